#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "meshsens/bounds.hpp"
#include "meshsens/linear_solver.hpp"
#include "meshsens/sensitivity.hpp"

namespace meshsens {

enum class Command { Convergence, TableSmooth, TableRandom, Validate, MeshInfo };

[[nodiscard]] Command parse_command(const std::string& name);
[[nodiscard]] std::string command_name(Command c);

struct VelocitySpec {
    enum class Kind { Analytic, Random };
    Kind kind = Kind::Analytic;
    std::string name = "paper-smooth";
    std::uint64_t seed = 1;
};

/// Experiment settings; see README for the JSON layout.
struct ExperimentConfig {
    /// Structured mesh sizes N (N x N cells). Ignored when mesh_file is set.
    std::vector<int> sizes;
    std::optional<std::string> mesh_file;
    std::string problem = "paper-example";
    VelocitySpec velocity;
    /// Strictly positive, ascending.
    std::vector<double> t_values;
    int repeats = 20;
    Difference difference = Difference::Forward;
    SolverOptions solver;
    std::optional<double> poincare;
    std::optional<double> a0;
    /// Accepted window for observed convergence rates.
    double rate_min = 0.85;
    double rate_max = 1.15;
    /// Minimum observed order of the derivative discrepancy.
    double min_order = 0.9;
    int threads = 1;

    /// Throws ConfigError when an invariant is violated.
    void validate() const;
};

/// Defaults reproducing the corresponding numerical study.
[[nodiscard]] ExperimentConfig default_config(Command command);

/// Overlays the keys present in `j` on `base`.
[[nodiscard]] ExperimentConfig apply_json(ExperimentConfig base, const nlohmann::json& j);

struct ExperimentResult {
    std::string name;
    std::string csv;
    nlohmann::json summary;
    std::vector<std::string> failures;

    [[nodiscard]] bool ok() const noexcept { return failures.empty(); }
};

[[nodiscard]] ExperimentResult run_convergence(const ExperimentConfig& config);
[[nodiscard]] ExperimentResult run_table_smooth(const ExperimentConfig& config);
[[nodiscard]] ExperimentResult run_table_random(const ExperimentConfig& config);
[[nodiscard]] ExperimentResult run_validate(const ExperimentConfig& config);
[[nodiscard]] ExperimentResult run_mesh_info(const ExperimentConfig& config);
[[nodiscard]] ExperimentResult run_experiment(Command command, const ExperimentConfig& config);

[[nodiscard]] nlohmann::json to_json(const BoundReport& report);

/// Fixed-format scientific notation used in every CSV (deterministic across runs).
[[nodiscard]] std::string format_number(double v);

/// Runs body(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace meshsens
