#pragma once

#include <optional>

#include "meshsens/coefficients.hpp"
#include "meshsens/femcore.hpp"
#include "meshsens/mesh.hpp"

namespace meshsens {

/// Poincare constant of the unit square, 1 / (sqrt(2) pi): the reciprocal square
/// root of the smallest Dirichlet Laplacian eigenvalue 2 pi^2.
[[nodiscard]] double unit_square_poincare_constant();

struct BoundInputs {
    int dim = 2;
    double poincare = 0;    ///< C_Omega
    double a0 = 0;
    double f_l2 = 0;        ///< ||f||_{L2}
    CoefficientNorms coeff;
    double velocity_sup = 0;                    ///< ||X'||_inf
    std::optional<double> velocity_grad_sup;    ///< ||grad X'||_inf, smooth fields only
    double max_aspect = 0;                      ///< max_K h_K / a_K
    double min_height = 0;                      ///< min_K a_K

    /// Throws std::invalid_argument on negative norms, a0 <= 0 or C_Omega <= 0.
    void validate() const;
};

/// Velocity norms entering the bounds.
struct VelocityNorms {
    double sup = 0;
    std::optional<double> grad_sup;
};

[[nodiscard]] BoundInputs make_bound_inputs(const SimplicialMesh& mesh, const Coefficients& coeffs,
                                            const VelocityNorms& velocity, double poincare);

/// Bound on ||grad u'_h|| for a smooth velocity field:
/// [ ||f|| (1 + C ||grad a|| + C^2 ||grad b|| + 2 C^2 ||c||) ||X'||
///   + ||f|| (3 d C ||a|| + 2 d C^2 ||b||) ||grad X'|| max_K h_K/a_K ] / a0
[[nodiscard]] double smooth_bound(const BoundInputs& in);

/// Same with ||grad X'|| max_K h_K/a_K replaced by ||X'|| / min_K a_K.
[[nodiscard]] double nonsmooth_bound(const BoundInputs& in);

struct BoundReport {
    BoundInputs inputs;
    double measured = 0;                  ///< ||grad u'_h||
    std::optional<double> smooth_rhs;     ///< present when the field has a gradient norm
    double nonsmooth_rhs = 0;
    bool smooth_satisfied = true;         ///< vacuously true without a smooth bound
    bool nonsmooth_satisfied = false;
    double primal_seminorm = 0;           ///< ||grad u_h||
    bool stability_satisfied = false;     ///< a0 ||grad u_h|| <= C_Omega ||f||

    [[nodiscard]] bool all_satisfied() const noexcept
    {
        return smooth_satisfied && nonsmooth_satisfied && stability_satisfied;
    }
};

[[nodiscard]] BoundReport verify_bounds(const SimplicialMesh& mesh, const BoundInputs& inputs, const FEFunction& u,
                                        const FEFunction& udot);

}  // namespace meshsens
