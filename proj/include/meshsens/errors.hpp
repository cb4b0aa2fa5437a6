#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace meshsens {

class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised for an element whose edge matrix is singular (zero volume).
class DegenerateElementError : public MeshError {
public:
    DegenerateElementError(std::size_t element, const std::string& what)
        : MeshError(what), element_(element) {}
    [[nodiscard]] std::size_t element() const noexcept { return element_; }

private:
    std::size_t element_;
};

/// Raised for an element with negative signed volume.
class InvertedElementError : public MeshError {
public:
    InvertedElementError(std::size_t element, const std::string& what)
        : MeshError(what), element_(element) {}
    [[nodiscard]] std::size_t element() const noexcept { return element_; }

private:
    std::size_t element_;
};

class MeshFormatError : public MeshError {
public:
    using MeshError::MeshError;
};

class CoefficientError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    /// Relative residual ||Ax - b|| / ||b|| reached before giving up.
    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace meshsens
