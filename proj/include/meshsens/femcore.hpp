#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "meshsens/coefficients.hpp"
#include "meshsens/linear_solver.hpp"
#include "meshsens/mesh.hpp"
#include "meshsens/quadrature.hpp"

namespace meshsens {

/// Maps vertices to degrees of freedom. Boundary vertices carry no unknown
/// (homogeneous Dirichlet data is eliminated).
struct DofMap {
    static constexpr std::ptrdiff_t kConstrained = -1;

    std::vector<std::ptrdiff_t> dof_of_vertex;
    std::vector<std::size_t> vertex_of_dof;

    [[nodiscard]] std::size_t size() const noexcept { return vertex_of_dof.size(); }
    static DofMap interior(const SimplicialMesh& mesh);
};

/// Continuous piecewise-linear function given by its vertex values.
struct FEFunction {
    Vector values;

    static FEFunction zero(const SimplicialMesh& mesh) { return {Vector::Zero(static_cast<Eigen::Index>(mesh.num_vertices()))}; }
    /// Embeds an interior-dof vector, filling boundary vertices with zero.
    static FEFunction from_dofs(const DofMap& dofs, const Vector& interior);
    /// Vertex values of a given function (nodal interpolant).
    static FEFunction interpolate(const SimplicialMesh& mesh, const std::function<double(const Vec&)>& g);

    [[nodiscard]] Vector restrict_to(const DofMap& dofs) const;
};

/// Interior-dof linear system; row-compressed, explicit zeros pruned.
struct SparseSystem {
    DofMap dofs;
    SparseMatrix matrix;
    Vector rhs;
    /// Quadrature points where c - div(b)/2 < 0 (only counted when grad b is known).
    std::size_t reaction_violations = 0;
};

/// P1 basis evaluated on one element: values at the quadrature points and constant gradients.
struct ElementBasis {
    const QuadratureRule* rule = nullptr;
    ElementGeometry geometry;
    std::vector<Vec> points;  ///< physical quadrature points

    /// phi_i at quadrature point q (barycentric coordinate for P1).
    [[nodiscard]] double value(std::size_t q, int i) const { return rule->points[q](i); }
    [[nodiscard]] Vec grad(int i) const { return geometry.grad_phi(i); }
    /// Integration weight |K| w_q.
    [[nodiscard]] double weight(std::size_t q) const { return geometry.volume * rule->weights[q]; }
    [[nodiscard]] int num_basis() const { return geometry.dim() + 1; }

    static ElementBasis build(const SimplicialMesh& mesh, std::size_t k, const QuadratureRule& rule);
};

/// Local matrix sum_q w_q (a grad phi_j . grad phi_i + (b . grad phi_j) phi_i + c phi_j phi_i)
/// and load vector sum_q w_q f phi_i on element k.
struct ElementSystem {
    Eigen::MatrixXd matrix;
    Eigen::VectorXd load;
};
[[nodiscard]] ElementSystem element_system(const SimplicialMesh& mesh, const Coefficients& coeffs, std::size_t k,
                                           const QuadratureRule& rule);

[[nodiscard]] SparseSystem assemble_primal(const SimplicialMesh& mesh, const Coefficients& coeffs);
[[nodiscard]] SparseSystem assemble_primal(const SimplicialMesh& mesh, const Coefficients& coeffs,
                                           const QuadratureRule& rule);

/// Solves a finalized system, returning the interior solution vector.
[[nodiscard]] Vector solve(const SparseSystem& system, SolverOptions options = {});

/// Primal solve that keeps the factorization so later right-hand sides
/// (the sensitivity problem) reuse it.
struct PrimalSolution {
    SparseSystem system;
    std::shared_ptr<const LinearSolver> solver;
    FEFunction u;
};

[[nodiscard]] PrimalSolution solve_primal(const SimplicialMesh& mesh, const Coefficients& coeffs,
                                          SolverOptions options = {});
[[nodiscard]] FEFunction solve_bvp(const SimplicialMesh& mesh, const Coefficients& coeffs, SolverOptions options = {});

/// Gradient of u on element k (constant for P1).
[[nodiscard]] Vec element_gradient(const SimplicialMesh& mesh, const ElementGeometry& geom, const FEFunction& u,
                                   std::size_t k);

/// (sum_K |K| |grad u|_K|^2)^{1/2}, exact for P1.
[[nodiscard]] double h1_seminorm(const SimplicialMesh& mesh, const FEFunction& u);
[[nodiscard]] double l2_norm(const SimplicialMesh& mesh, const FEFunction& u);
/// ||grad(u_h - u)||_{L2} by the default quadrature rule.
[[nodiscard]] double h1_error(const SimplicialMesh& mesh, const FEFunction& u,
                              const std::function<Vec(const Vec&)>& exact_grad);
/// ||g||_{L2} by the default quadrature rule.
[[nodiscard]] double l2_norm(const SimplicialMesh& mesh, const std::function<double(const Vec&)>& g);

}  // namespace meshsens
