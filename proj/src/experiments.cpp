#include "meshsens/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "meshsens/errors.hpp"
#include "meshsens/random.hpp"

namespace meshsens {

using nlohmann::json;

Command parse_command(const std::string& name)
{
    if (name == "convergence") return Command::Convergence;
    if (name == "table-smooth") return Command::TableSmooth;
    if (name == "table-random") return Command::TableRandom;
    if (name == "validate") return Command::Validate;
    if (name == "mesh-info") return Command::MeshInfo;
    throw ConfigError("unknown command '" + name + "'");
}

std::string command_name(Command c)
{
    switch (c) {
    case Command::Convergence: return "convergence";
    case Command::TableSmooth: return "table-smooth";
    case Command::TableRandom: return "table-random";
    case Command::Validate: return "validate";
    case Command::MeshInfo: return "mesh-info";
    }
    return "unknown";
}

void ExperimentConfig::validate() const
{
    if (!mesh_file && sizes.empty()) throw ConfigError("config needs mesh sizes or a mesh file");
    for (int n : sizes)
        if (n < 1) throw ConfigError("mesh sizes must be positive");
    for (std::size_t i = 0; i < t_values.size(); ++i) {
        if (!(t_values[i] > 0)) throw ConfigError("t_values must be strictly positive");
        if (i > 0 && !(t_values[i] > t_values[i - 1])) throw ConfigError("t_values must be sorted ascending");
    }
    if (repeats < 1) throw ConfigError("repeats must be at least 1");
    if (threads < 1) throw ConfigError("threads must be at least 1");
    if (poincare && !(*poincare > 0)) throw ConfigError("poincare_constant must be positive");
    if (a0 && !(*a0 > 0)) throw ConfigError("a0 must be positive");
    if (!(solver.tolerance > 0)) throw ConfigError("solver tolerance must be positive");
}

ExperimentConfig default_config(Command command)
{
    ExperimentConfig c;
    switch (command) {
    case Command::Convergence: c.sizes = {10, 20, 40, 80}; break;
    case Command::TableSmooth:
        c.sizes = {40, 80};
        c.t_values = {1e-6, 1e-5, 1e-4, 1e-3, 1e-2};
        break;
    case Command::TableRandom:
        c.sizes = {40, 80};
        c.velocity = {VelocitySpec::Kind::Random, "random", 1};
        c.t_values = {1e-6, 1e-5, 1e-4, 1e-3};
        break;
    case Command::Validate:
        c.sizes = {20};
        c.t_values = {1e-4, 1e-3, 1e-2};
        break;
    case Command::MeshInfo: c.sizes = {40}; break;
    }
    return c;
}

ExperimentConfig apply_json(ExperimentConfig c, const json& j)
{
    try {
        if (!j.is_object()) throw ConfigError("config must be a JSON object");
        if (j.contains("mesh")) {
            const auto& m = j.at("mesh");
            if (m.contains("structured")) {
                c.sizes = m.at("structured").is_array() ? m.at("structured").get<std::vector<int>>()
                                                        : std::vector<int>{m.at("structured").get<int>()};
                c.mesh_file.reset();
            }
            if (m.contains("file")) c.mesh_file = m.at("file").get<std::string>();
        }
        if (j.contains("sizes")) c.sizes = j.at("sizes").get<std::vector<int>>();
        if (j.contains("problem")) c.problem = j.at("problem").get<std::string>();
        if (j.contains("velocity")) {
            const auto& v = j.at("velocity");
            const auto kind = v.at("kind").get<std::string>();
            if (kind == "analytic") {
                c.velocity.kind = VelocitySpec::Kind::Analytic;
                c.velocity.name = v.at("name").get<std::string>();
            } else if (kind == "random") {
                c.velocity.kind = VelocitySpec::Kind::Random;
                c.velocity.name = "random";
                if (v.contains("seed")) c.velocity.seed = v.at("seed").get<std::uint64_t>();
            } else {
                throw ConfigError("velocity kind must be 'analytic' or 'random'");
            }
        }
        if (j.contains("t_values")) c.t_values = j.at("t_values").get<std::vector<double>>();
        if (j.contains("repeats")) c.repeats = j.at("repeats").get<int>();
        if (j.contains("difference")) {
            const auto d = j.at("difference").get<std::string>();
            if (d == "forward") c.difference = Difference::Forward;
            else if (d == "central") c.difference = Difference::Central;
            else throw ConfigError("difference must be 'forward' or 'central'");
        }
        if (j.contains("solver")) {
            const auto& s = j.at("solver");
            if (s.contains("method")) {
                const auto m = s.at("method").get<std::string>();
                if (m == "auto") c.solver.method = SolverOptions::Method::Auto;
                else if (m == "direct") c.solver.method = SolverOptions::Method::Direct;
                else if (m == "iterative") c.solver.method = SolverOptions::Method::Iterative;
                else throw ConfigError("solver method must be auto, direct or iterative");
            }
            if (s.contains("tolerance")) c.solver.tolerance = s.at("tolerance").get<double>();
            if (s.contains("max_iterations")) c.solver.max_iterations = s.at("max_iterations").get<int>();
        }
        if (j.contains("poincare_constant")) c.poincare = j.at("poincare_constant").get<double>();
        if (j.contains("a0")) c.a0 = j.at("a0").get<double>();
        if (j.contains("rate_window")) {
            const auto w = j.at("rate_window").get<std::vector<double>>();
            if (w.size() != 2) throw ConfigError("rate_window needs two entries");
            c.rate_min = w[0];
            c.rate_max = w[1];
        }
        if (j.contains("min_order")) c.min_order = j.at("min_order").get<double>();
        if (j.contains("threads")) c.threads = j.at("threads").get<int>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    return c;
}

std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10e", v);
    return buf;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body)
{
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < std::min(workers, n); ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) error = std::current_exception();
                    }
                }
            });
        }
    }
    if (error) std::rethrow_exception(error);
}

json to_json(const BoundReport& r)
{
    json j;
    const auto& in = r.inputs;
    j["inputs"] = {{"d", in.dim},
                   {"poincare_constant", in.poincare},
                   {"a0", in.a0},
                   {"f_l2", in.f_l2},
                   {"a_sup", in.coeff.a_sup},
                   {"grad_a_sup", in.coeff.grad_a_sup},
                   {"b_sup", in.coeff.b_sup},
                   {"grad_b_sup", in.coeff.grad_b_sup},
                   {"c_sup", in.coeff.c_sup},
                   {"velocity_sup", in.velocity_sup},
                   {"velocity_grad_sup", in.velocity_grad_sup ? json(*in.velocity_grad_sup) : json(nullptr)},
                   {"max_aspect", in.max_aspect},
                   {"min_height", in.min_height}};
    j["measured"] = r.measured;
    j["smooth_rhs"] = r.smooth_rhs ? json(*r.smooth_rhs) : json(nullptr);
    j["nonsmooth_rhs"] = r.nonsmooth_rhs;
    j["smooth_satisfied"] = r.smooth_satisfied;
    j["nonsmooth_satisfied"] = r.nonsmooth_satisfied;
    j["primal_seminorm"] = r.primal_seminorm;
    j["stability_satisfied"] = r.stability_satisfied;
    return j;
}

namespace {

struct LabeledMesh {
    int n = 0;  // 0 for meshes read from file
    SimplicialMesh mesh;
};

std::vector<LabeledMesh> meshes_for(const ExperimentConfig& c)
{
    std::vector<LabeledMesh> out;
    if (c.mesh_file) {
        out.push_back({0, read_mesh(*c.mesh_file)});
    } else {
        for (int n : c.sizes) out.push_back({n, build_structured_mesh(n)});
    }
    return out;
}

Coefficients problem_for(const ExperimentConfig& c)
{
    auto k = coefficients_from_catalog(c.problem);
    if (c.a0) k.a0 = *c.a0;
    return k;
}

double poincare_for(const ExperimentConfig& c) { return c.poincare.value_or(unit_square_poincare_constant()); }

VelocityField field_for(const VelocitySpec& spec, int dim, std::uint64_t seed)
{
    if (spec.kind == VelocitySpec::Kind::Random) return VelocityField::random(seed, dim);
    auto f = velocity_from_catalog(spec.name, dim);
    if (!f.sup_norm) estimate_norms(f);
    return f;
}

VelocityNorms norms_for(const VelocityField& field, const NodalVelocity& nodal)
{
    if (field.kind == VelocityField::Kind::NodalRandom) return {nodal.max_norm(), std::nullopt};
    return {field.sup_norm.value_or(nodal.max_norm()), field.grad_sup_norm};
}

std::string bound_failure(const std::string& where, const BoundReport& r)
{
    std::ostringstream s;
    s << where << ": ";
    if (!r.smooth_satisfied) s << "smooth bound violated (" << r.measured << " > " << *r.smooth_rhs << ") ";
    if (!r.nonsmooth_satisfied) s << "nonsmooth bound violated (" << r.measured << " > " << r.nonsmooth_rhs << ") ";
    if (!r.stability_satisfied) s << "stability estimate violated ";
    return s.str();
}

std::string label(const LabeledMesh& m) { return m.n > 0 ? std::to_string(m.n) : std::string("file"); }

}  // namespace

ExperimentResult run_mesh_info(const ExperimentConfig& c)
{
    c.validate();
    ExperimentResult r{"mesh-info", {}, json::object(), {}};
    std::ostringstream csv;
    csv << "N,vertices,interior_vertices,elements,max_aspect,min_height,max_diameter,total_volume\n";
    json rows = json::array();
    for (const auto& m : meshes_for(c)) {
        const auto q = mesh_quality(m.mesh);
        csv << label(m) << ',' << m.mesh.num_vertices() << ',' << m.mesh.num_interior_vertices() << ','
            << m.mesh.num_elements() << ',' << format_number(q.max_aspect) << ',' << format_number(q.min_height) << ','
            << format_number(q.max_diameter) << ',' << format_number(q.total_volume) << '\n';
        rows.push_back({{"N", m.n},
                        {"vertices", m.mesh.num_vertices()},
                        {"elements", m.mesh.num_elements()},
                        {"max_aspect", q.max_aspect},
                        {"min_height", q.min_height}});
    }
    r.csv = csv.str();
    r.summary["meshes"] = rows;
    return r;
}

ExperimentResult run_convergence(const ExperimentConfig& c)
{
    c.validate();
    const auto coeffs = problem_for(c);
    if (!coeffs.has_exact_solution()) throw ConfigError("convergence study needs a problem with an exact solution");
    const auto meshes = meshes_for(c);

    struct Row {
        double h = 0, error = 0, seminorm = 0;
        MeshQuality q;
        bool stable = false;
    };
    std::vector<Row> rows(meshes.size());
    parallel_for(meshes.size(), c.threads, [&](std::size_t i) {
        const auto& mesh = meshes[i].mesh;
        const auto u = solve_bvp(mesh, coeffs, c.solver);
        Row& row = rows[i];
        row.q = mesh_quality(mesh);
        row.h = row.q.max_diameter;
        row.error = h1_error(mesh, u, coeffs.exact_grad);
        row.seminorm = h1_seminorm(mesh, u);
        row.stable = row.seminorm <= poincare_for(c) * l2_norm(mesh, coeffs.f) / coeffs.a0;
    });

    ExperimentResult r{"convergence", {}, json::object(), {}};
    std::ostringstream csv;
    csv << "N,h,h1_error,observed_rate,max_aspect,min_height,grad_uh_norm\n";
    json jrows = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::optional<double> rate;
        if (i > 0) rate = std::log(rows[i - 1].error / rows[i].error) / std::log(rows[i - 1].h / rows[i].h);
        csv << label(meshes[i]) << ',' << format_number(rows[i].h) << ',' << format_number(rows[i].error) << ','
            << (rate ? format_number(*rate) : "") << ',' << format_number(rows[i].q.max_aspect) << ','
            << format_number(rows[i].q.min_height) << ',' << format_number(rows[i].seminorm) << '\n';
        jrows.push_back({{"N", meshes[i].n},
                         {"h1_error", rows[i].error},
                         {"observed_rate", rate ? json(*rate) : json(nullptr)}});
        if (rate && !(*rate >= c.rate_min && *rate <= c.rate_max))
            r.failures.push_back("convergence rate " + format_number(*rate) + " at N=" + label(meshes[i]) +
                                 " outside [" + format_number(c.rate_min) + ", " + format_number(c.rate_max) + "]");
        if (!rows[i].stable) r.failures.push_back("stability estimate violated at N=" + label(meshes[i]));
    }
    r.csv = csv.str();
    r.summary["rows"] = jrows;
    return r;
}

ExperimentResult run_table_smooth(const ExperimentConfig& c)
{
    c.validate();
    const auto coeffs = problem_for(c);
    const auto meshes = meshes_for(c);
    ExperimentResult r{"table-smooth", {}, json::object(), {}};

    struct Cell {
        double change = 0;
        bool skipped = false;
        std::string note;
    };
    std::ostringstream csv;
    csv << "N,t,change_norm,derivative_norm,t_times_derivative_norm,change_over_t,status\n";
    json per_mesh = json::array();

    for (const auto& m : meshes) {
        const auto field = field_for(c.velocity, m.mesh.dim(), c.velocity.seed);
        const auto v = sample_nodal_velocity(m.mesh, field);
        const auto primal = solve_primal(m.mesh, coeffs, c.solver);
        const auto udot = solve_sensitivity(m.mesh, coeffs, primal, v);
        const double dnorm = h1_seminorm(m.mesh, udot);

        std::vector<Cell> cells(c.t_values.size());
        parallel_for(cells.size(), c.threads, [&](std::size_t i) {
            try {
                cells[i].change = h1_seminorm(m.mesh, solution_change(m.mesh, coeffs, primal.u, v, c.t_values[i], c.solver));
            } catch (const MeshError& e) {
                cells[i].skipped = true;
                cells[i].note = e.what();
            }
        });
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const double t = c.t_values[i];
            csv << label(m) << ',' << format_number(t) << ',';
            if (cells[i].skipped) {
                csv << ",," << format_number(t * dnorm) << ",,inverted\n";
                continue;
            }
            csv << format_number(cells[i].change) << ',' << format_number(dnorm) << ',' << format_number(t * dnorm)
                << ',' << format_number(cells[i].change / t) << ",ok\n";
        }

        const auto inputs = make_bound_inputs(m.mesh, coeffs, norms_for(field, v), poincare_for(c));
        const auto report = verify_bounds(m.mesh, inputs, primal.u, udot);
        if (!report.all_satisfied()) r.failures.push_back(bound_failure("N=" + label(m), report));
        json jm = {{"N", m.n}, {"derivative_norm", dnorm}, {"bounds", to_json(report)}};
        json jc = json::array();
        for (std::size_t i = 0; i < cells.size(); ++i)
            jc.push_back({{"t", c.t_values[i]},
                          {"change_norm", cells[i].skipped ? json(nullptr) : json(cells[i].change)},
                          {"note", cells[i].note}});
        jm["cells"] = jc;
        per_mesh.push_back(jm);
    }
    r.csv = csv.str();
    r.summary["meshes"] = per_mesh;
    r.summary["velocity"] = c.velocity.name;
    return r;
}

ExperimentResult run_table_random(const ExperimentConfig& c)
{
    c.validate();
    if (c.velocity.kind != VelocitySpec::Kind::Random) throw ConfigError("table-random needs a random velocity spec");
    const auto coeffs = problem_for(c);
    const auto meshes = meshes_for(c);
    const auto nt = c.t_values.size();
    const auto nrep = static_cast<std::size_t>(c.repeats);
    ExperimentResult r{"table-random", {}, json::object(), {}};

    std::ostringstream csv;
    csv << "N,t,repeats,valid_repeats,mean_change_norm,min_change_norm,max_change_norm,stddev_change_norm,"
           "mean_change_over_t,mean_derivative_norm\n";
    json per_mesh = json::array();

    for (const auto& m : meshes) {
        const auto primal = solve_primal(m.mesh, coeffs, c.solver);
        const double poincare = poincare_for(c);

        struct Repeat {
            std::vector<double> change;
            std::vector<bool> valid;
            double derivative_norm = 0;
            BoundReport report;
        };
        std::vector<Repeat> reps(nrep);
        parallel_for(nrep, c.threads, [&](std::size_t k) {
            const auto field = VelocityField::random(rng::split_seed(c.velocity.seed, k), m.mesh.dim());
            const auto v = sample_nodal_velocity(m.mesh, field);
            const auto udot = solve_sensitivity(m.mesh, coeffs, primal, v);
            Repeat& rep = reps[k];
            rep.derivative_norm = h1_seminorm(m.mesh, udot);
            rep.change.assign(nt, 0.0);
            rep.valid.assign(nt, false);
            for (std::size_t i = 0; i < nt; ++i) {
                try {
                    rep.change[i] = h1_seminorm(m.mesh, solution_change(m.mesh, coeffs, primal.u, v, c.t_values[i], c.solver));
                    rep.valid[i] = true;
                } catch (const MeshError&) {
                }
            }
            rep.report = verify_bounds(m.mesh, make_bound_inputs(m.mesh, coeffs, norms_for(field, v), poincare), primal.u, udot);
        });

        double mean_derivative = 0;
        std::size_t bound_violations = 0;
        double worst_ratio = 0;
        for (std::size_t k = 0; k < nrep; ++k) {
            mean_derivative += reps[k].derivative_norm / static_cast<double>(nrep);
            worst_ratio = std::max(worst_ratio, reps[k].report.measured / reps[k].report.nonsmooth_rhs);
            if (!reps[k].report.all_satisfied()) {
                ++bound_violations;
                r.failures.push_back(bound_failure("N=" + label(m) + " repeat " + std::to_string(k), reps[k].report));
            }
        }

        json jt = json::array();
        for (std::size_t i = 0; i < nt; ++i) {
            std::vector<double> vals;
            for (const auto& rep : reps)
                if (rep.valid[i]) vals.push_back(rep.change[i]);
            const double t = c.t_values[i];
            csv << label(m) << ',' << format_number(t) << ',' << nrep << ',' << vals.size() << ',';
            if (vals.empty()) {
                csv << ",,,,," << format_number(mean_derivative) << '\n';
                continue;
            }
            double mean = 0;
            for (double x : vals) mean += x / static_cast<double>(vals.size());
            double var = 0;
            for (double x : vals) var += (x - mean) * (x - mean);
            const double stddev = vals.size() > 1 ? std::sqrt(var / static_cast<double>(vals.size() - 1)) : 0.0;
            const auto [mn, mx] = std::minmax_element(vals.begin(), vals.end());
            csv << format_number(mean) << ',' << format_number(*mn) << ',' << format_number(*mx) << ','
                << format_number(stddev) << ',' << format_number(mean / t) << ',' << format_number(mean_derivative)
                << '\n';
            jt.push_back({{"t", t}, {"mean_change_norm", mean}, {"valid_repeats", vals.size()}});
        }
        per_mesh.push_back({{"N", m.n},
                            {"mean_derivative_norm", mean_derivative},
                            {"bound_violations", bound_violations},
                            {"max_measured_over_nonsmooth_rhs", worst_ratio},
                            {"min_height", mesh_quality(m.mesh).min_height},
                            {"cells", jt}});
    }
    r.csv = csv.str();
    r.summary["meshes"] = per_mesh;
    r.summary["master_seed"] = c.velocity.seed;
    r.summary["repeats"] = c.repeats;
    return r;
}

ExperimentResult run_validate(const ExperimentConfig& c)
{
    c.validate();
    const auto coeffs = problem_for(c);
    const auto meshes = meshes_for(c);
    const auto& m = meshes.front();
    ExperimentResult r{"validate", {}, json::object(), {}};

    const auto field = field_for(c.velocity, m.mesh.dim(), c.velocity.seed);
    const auto v = sample_nodal_velocity(m.mesh, field);
    const auto primal = solve_primal(m.mesh, coeffs, c.solver);
    const auto udot = solve_sensitivity(m.mesh, coeffs, primal, v);

    std::vector<ValidationRecord> records(c.t_values.size());
    parallel_for(records.size(), c.threads, [&](std::size_t i) {
        records[i] = validate_material_derivative(m.mesh, coeffs, primal.u, udot, v, {c.t_values[i]},
                                                  {c.difference, c.solver})
                         .front();
    });

    std::ostringstream csv;
    csv << "t,change_norm,fd_norm,analytic_norm,discrepancy,observed_order\n";
    json jrows = json::array();
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        csv << format_number(rec.t) << ',';
        if (rec.skipped) {
            csv << ",," << format_number(rec.analytic_norm) << ",,\n";
            r.failures.push_back("t=" + format_number(rec.t) + " skipped: " + rec.note);
            continue;
        }
        std::optional<double> order;
        if (i > 0 && !records[i - 1].skipped) {
            const auto& prev = records[i - 1];
            // Discrepancies at the rounding floor carry no order information.
            const double floor = 1e-12 * std::max(1.0, rec.analytic_norm);
            if (rec.discrepancy > floor && prev.discrepancy > floor) {
                order = std::log(rec.discrepancy / prev.discrepancy) / std::log(rec.t / prev.t);
                if (*order < c.min_order)
                    r.failures.push_back("observed order " + format_number(*order) + " between t=" +
                                         format_number(prev.t) + " and t=" + format_number(rec.t) + " below " +
                                         format_number(c.min_order));
            } else {
                order = 0.0;
            }
        }
        csv << format_number(rec.change_norm) << ',' << format_number(rec.fd_norm) << ','
            << format_number(rec.analytic_norm) << ',' << format_number(rec.discrepancy) << ','
            << (order ? format_number(*order) : "") << '\n';
        jrows.push_back({{"t", rec.t},
                         {"fd_norm", rec.fd_norm},
                         {"analytic_norm", rec.analytic_norm},
                         {"discrepancy", rec.discrepancy},
                         {"observed_order", order ? json(*order) : json(nullptr)}});
    }

    const auto report =
        verify_bounds(m.mesh, make_bound_inputs(m.mesh, coeffs, norms_for(field, v), poincare_for(c)), primal.u, udot);
    if (!report.all_satisfied()) r.failures.push_back(bound_failure("validate", report));

    r.csv = csv.str();
    r.summary["rows"] = jrows;
    r.summary["bounds"] = to_json(report);
    r.summary["N"] = m.n;
    r.summary["velocity"] = c.velocity.name;
    r.summary["difference"] = c.difference == Difference::Central ? "central" : "forward";
    return r;
}

ExperimentResult run_experiment(Command command, const ExperimentConfig& config)
{
    switch (command) {
    case Command::Convergence: return run_convergence(config);
    case Command::TableSmooth: return run_table_smooth(config);
    case Command::TableRandom: return run_table_random(config);
    case Command::Validate: return run_validate(config);
    case Command::MeshInfo: return run_mesh_info(config);
    }
    throw ConfigError("unknown command");
}

}  // namespace meshsens
