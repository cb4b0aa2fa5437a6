#include "meshsens/sensitivity.hpp"

#include <cmath>

#include "meshsens/errors.hpp"

namespace meshsens {

SensitivityRhsBreakdown assemble_sensitivity_rhs(const SimplicialMesh& mesh, const Coefficients& coeffs,
                                                 const DofMap& dofs, const FEFunction& u,
                                                 const NodalVelocity& velocity, RhsForm form)
{
    if (!coeffs.has_gradients())
        throw ConfigError("sensitivity assembly needs analytic gradients of a, b, c and f (problem '" + coeffs.name +
                          "')");
    if (velocity.size() != mesh.num_vertices()) throw std::invalid_argument("nodal velocity size mismatch");

    const auto n = static_cast<Eigen::Index>(dofs.size());
    SensitivityRhsBreakdown out{Vector::Zero(n), Vector::Zero(n), Vector::Zero(n), Vector::Zero(n), Vector::Zero(n)};
    const auto& rule = default_rule(mesh.dim());

    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        const auto el = mesh.element(k);
        const auto eb = ElementBasis::build(mesh, k, rule);
        const auto def = element_deformation(mesh, eb.geometry, velocity, k);
        const Vec gu = element_gradient(mesh, eb.geometry, u, k);
        const Mat s_sym = def.s + def.s.transpose();
        const Vec st_gu = def.s.transpose() * gu;
        const int nb = eb.num_basis();

        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec& x = eb.points[q];
            const double w = eb.weight(q);
            const Vec xdot = interpolate_velocity(mesh, velocity, k, rule.points[q]);
            double uq = 0.0;
            for (int i = 0; i < nb; ++i) uq += u.values(static_cast<Eigen::Index>(el[static_cast<std::size_t>(i)])) * eb.value(q, i);

            const double a = coeffs.a(x);
            const Vec b = coeffs.b(x);
            const double c = coeffs.c(x);
            const double f = coeffs.f(x);
            const double grad_a_xdot = coeffs.grad_a(x).dot(xdot);
            const double xdot_grad_b_gu = gu.dot(coeffs.grad_b(x) * xdot);
            const double b_gu = b.dot(gu);
            const double gu_xdot = gu.dot(xdot);

            for (int i = 0; i < nb; ++i) {
                const auto row = dofs.dof_of_vertex[el[static_cast<std::size_t>(i)]];
                if (row == DofMap::kConstrained) continue;
                const Vec gi = eb.grad(i);
                const double phi = eb.value(q, i);
                const double gu_gi = gu.dot(gi);

                out.geometric(row) += w * (a * gu.dot(s_sym * gi) + b.dot(st_gu) * phi);
                out.a_term(row) -= w * (grad_a_xdot * gu_gi + a * gu_gi * def.div);
                out.b_term(row) -= w * (xdot_grad_b_gu * phi + b_gu * phi * def.div);
                if (form == RhsForm::Final) {
                    out.c_term(row) += w * (c * phi * gu_xdot + c * uq * gi.dot(xdot));
                    out.f_term(row) -= w * f * gi.dot(xdot);
                } else {
                    out.c_term(row) -= w * (coeffs.grad_c(x).dot(xdot) * uq * phi + c * uq * phi * def.div);
                    out.f_term(row) += w * (coeffs.grad_f(x).dot(xdot) * phi + f * phi * def.div);
                }
            }
        }
    }
    return out;
}

FEFunction solve_sensitivity(const SimplicialMesh& mesh, const Coefficients& coeffs, const PrimalSolution& primal,
                             const NodalVelocity& velocity)
{
    const auto rhs = assemble_sensitivity_rhs(mesh, coeffs, primal.system.dofs, primal.u, velocity).total();
    return FEFunction::from_dofs(primal.system.dofs, primal.solver->solve(rhs));
}

FEFunction solution_change(const SimplicialMesh& mesh, const Coefficients& coeffs, const FEFunction& u0,
                           const NodalVelocity& velocity, double t, SolverOptions options)
{
    const auto moved = t >= 0.0 ? deform_mesh(mesh, velocity, t) : deform_mesh(mesh, velocity.scaled(-1.0), -t);
    FEFunction ut = solve_bvp(moved, coeffs, options);
    ut.values -= u0.values;
    return ut;
}

std::vector<ValidationRecord> validate_material_derivative(const SimplicialMesh& mesh, const Coefficients& coeffs,
                                                           const FEFunction& u0, const FEFunction& udot,
                                                           const NodalVelocity& velocity,
                                                           const std::vector<double>& t_values,
                                                           const ValidationOptions& options)
{
    const double analytic = h1_seminorm(mesh, udot);
    std::vector<ValidationRecord> out;
    for (const double t : t_values) {
        ValidationRecord r;
        r.t = t;
        r.analytic_norm = analytic;
        try {
            const FEFunction forward = solution_change(mesh, coeffs, u0, velocity, t, options.solver);
            r.change_norm = h1_seminorm(mesh, forward);
            FEFunction quotient = forward;
            if (options.difference == Difference::Central) {
                const FEFunction backward = solution_change(mesh, coeffs, u0, velocity, -t, options.solver);
                quotient.values = (forward.values - backward.values) / (2.0 * t);
            } else {
                quotient.values /= t;
            }
            r.fd_norm = h1_seminorm(mesh, quotient);
            FEFunction diff = udot;
            diff.values -= quotient.values;
            r.discrepancy = h1_seminorm(mesh, diff);
        } catch (const MeshError& e) {
            r.skipped = true;
            r.note = e.what();
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<double> observed_orders(const std::vector<double>& steps, const std::vector<double>& errors)
{
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < steps.size() && i + 1 < errors.size(); ++i)
        out.push_back(std::log(errors[i] / errors[i + 1]) / std::log(steps[i] / steps[i + 1]));
    return out;
}

}  // namespace meshsens
