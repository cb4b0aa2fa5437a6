#pragma once

#include <string>
#include <vector>

#include "meshsens/femcore.hpp"
#include "meshsens/velocity.hpp"

namespace meshsens {

/// Right-hand side of the material-derivative problem, split by integral group.
/// Each vector is indexed by interior degree of freedom.
struct SensitivityRhsBreakdown {
    /// a grad u . (S + S^T) . grad psi + (b . S^T grad u) psi, with S = E'_K E_K^{-1}
    Vector geometric;
    /// -(grad a . X'_h)(grad u . grad psi) - a (grad u . grad psi) div X'_h
    Vector a_term;
    /// -(X'_h . grad b . grad u) psi - (b . grad u) psi div X'_h
    Vector b_term;
    /// final form:  c psi (grad u . X'_h) + c u (grad psi . X'_h)
    /// before integration by parts:  -(grad c . X'_h) u psi - c u psi div X'_h
    Vector c_term;
    /// final form:  -f (grad psi . X'_h)
    /// before integration by parts:  (grad f . X'_h) psi + f psi div X'_h
    Vector f_term;

    [[nodiscard]] Vector total() const { return geometric + a_term + b_term + c_term + f_term; }
};

/// Which algebraic form of the reaction and source groups to assemble.
/// Both agree for interior test functions because the boundary terms of the
/// divergence theorem vanish there.
enum class RhsForm { Final, BeforeIntegrationByParts };

/// Requires analytic gradients of a, b, c and f (ConfigError otherwise).
[[nodiscard]] SensitivityRhsBreakdown assemble_sensitivity_rhs(const SimplicialMesh& mesh, const Coefficients& coeffs,
                                                               const DofMap& dofs, const FEFunction& u,
                                                               const NodalVelocity& velocity,
                                                               RhsForm form = RhsForm::Final);

/// Material derivative of the FE solution under the mesh velocity; reuses the
/// primal factorization.
[[nodiscard]] FEFunction solve_sensitivity(const SimplicialMesh& mesh, const Coefficients& coeffs,
                                           const PrimalSolution& primal, const NodalVelocity& velocity);

/// u_h(t) - u_h(0) as nodal coefficients on the base mesh, where u_h(t) solves the
/// problem on the mesh deformed with step t (negative t moves against the velocity).
[[nodiscard]] FEFunction solution_change(const SimplicialMesh& mesh, const Coefficients& coeffs, const FEFunction& u0,
                                         const NodalVelocity& velocity, double t, SolverOptions options = {});

enum class Difference { Forward, Central };

struct ValidationOptions {
    Difference difference = Difference::Forward;
    SolverOptions solver;
};

struct ValidationRecord {
    double t = 0;
    bool skipped = false;
    std::string note;
    double change_norm = 0;    ///< ||grad(u_h(t) - u_h)||
    double fd_norm = 0;        ///< ||grad(u_h(t) - u_h)|| / t
    double analytic_norm = 0;  ///< ||grad u'_h||
    double discrepancy = 0;    ///< ||grad(u'_h - (u_h(t) - u_h) / t)||
};

/// Compares u'_h against the finite-difference quotient for each t. Steps that
/// invert an element are skipped and flagged.
[[nodiscard]] std::vector<ValidationRecord> validate_material_derivative(
    const SimplicialMesh& mesh, const Coefficients& coeffs, const FEFunction& u0, const FEFunction& udot,
    const NodalVelocity& velocity, const std::vector<double>& t_values, const ValidationOptions& options = {});

/// Observed orders log(e_i / e_{i+1}) / log(h_i / h_{i+1}) between consecutive entries.
[[nodiscard]] std::vector<double> observed_orders(const std::vector<double>& steps, const std::vector<double>& errors);

}  // namespace meshsens
