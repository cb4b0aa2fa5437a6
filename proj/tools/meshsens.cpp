// Experiment runner: convergence study, smooth/random sensitivity tables,
// derivative validation and mesh statistics.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "meshsens/errors.hpp"
#include "meshsens/experiments.hpp"

namespace fs = std::filesystem;
using meshsens::Command;

namespace {

std::optional<int> threads_from_env()
{
    if (const char* env = std::getenv("MESHSENS_THREADS")) {
        try {
            return std::stoi(env);
        } catch (const std::exception&) {
            throw meshsens::ConfigError(std::string("MESHSENS_THREADS is not an integer: ") + env);
        }
    }
    return std::nullopt;
}

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Mesh sensitivity of finite element solutions: experiment runner"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "meshsens-out";
    std::optional<std::uint64_t> seed;
    std::optional<int> repeats;
    std::optional<int> threads;

    const std::pair<const char*, const char*> commands[] = {
        {"convergence", "H1 convergence study on the manufactured problem"},
        {"table-smooth", "solution change under the smooth velocity field"},
        {"table-random", "solution change under seeded random velocities, averaged over repeats"},
        {"validate", "material derivative vs finite differences, plus bound verification"},
        {"mesh-info", "mesh statistics (sizes, aspect ratio, minimum height)"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory for CSV and summary.json");
        sub->add_option("--seed", seed, "master seed for random velocities");
        sub->add_option("--repeats", repeats, "number of random repeats")->check(CLI::PositiveNumber);
        sub->add_option("--threads", threads, "worker threads (default: MESHSENS_THREADS or 1)")
            ->check(CLI::PositiveNumber);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const auto* sub = app.get_subcommands().front();
        const Command command = meshsens::parse_command(sub->get_name());

        auto config = meshsens::default_config(command);
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            nlohmann::json j;
            try {
                in >> j;
            } catch (const nlohmann::json::exception& e) {
                throw meshsens::ConfigError("cannot parse " + config_path + ": " + e.what());
            }
            config = meshsens::apply_json(config, j);
        }
        if (seed) config.velocity.seed = *seed;
        if (repeats) config.repeats = *repeats;
        if (threads) config.threads = *threads;
        else if (auto env = threads_from_env()) config.threads = *env;

        const auto result = meshsens::run_experiment(command, config);

        fs::create_directories(out_dir);
        const fs::path csv_path = fs::path(out_dir) / (result.name + ".csv");
        write_file(csv_path, result.csv);
        auto summary = result.summary;
        summary["command"] = result.name;
        summary["passed"] = result.ok();
        summary["failures"] = result.failures;
        write_file(fs::path(out_dir) / (result.name + ".summary.json"), summary.dump(2) + "\n");

        std::cout << result.csv;
        std::cout << "wrote " << csv_path.string() << '\n';
        if (result.ok()) {
            std::cout << "all checks passed\n";
            return 0;
        }
        std::cerr << result.failures.size() << " check(s) failed:\n";
        for (const auto& f : result.failures) std::cerr << "  - " << f << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
