#pragma once

#include <cstdint>

namespace meshsens::rng {

/// Counter-based generator built on the SplitMix64 finalizer.
///
/// Draw k of stream `seed` is mix64(seed + (k + 1) * kGamma). Every draw is a pure
/// function of (seed, k), so samples can be produced in any order or in parallel
/// and are identical across platforms.
inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t draw(std::uint64_t seed, std::uint64_t counter) noexcept
{
    return mix64(seed + (counter + 1) * kGamma);
}

/// Uniform in the open interval (-1, 1): the top 53 bits b give ((b + 1/2) / 2^52) - 1.
constexpr double symmetric_unit(std::uint64_t seed, std::uint64_t counter) noexcept
{
    const auto bits = draw(seed, counter) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-52 - 1.0;
}

/// Seed of repeat i derived from a master seed: mix64(master XOR i).
constexpr std::uint64_t split_seed(std::uint64_t master, std::uint64_t i) noexcept
{
    return mix64(master ^ i);
}

}  // namespace meshsens::rng
