#include "meshsens/femcore.hpp"

#include <cmath>
#include <string>

#include "meshsens/errors.hpp"

namespace meshsens {

DofMap DofMap::interior(const SimplicialMesh& mesh)
{
    DofMap m;
    m.dof_of_vertex.assign(mesh.num_vertices(), kConstrained);
    for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
        if (mesh.is_boundary(i)) continue;
        m.dof_of_vertex[i] = static_cast<std::ptrdiff_t>(m.vertex_of_dof.size());
        m.vertex_of_dof.push_back(i);
    }
    return m;
}

FEFunction FEFunction::from_dofs(const DofMap& dofs, const Vector& interior)
{
    FEFunction u{Vector::Zero(static_cast<Eigen::Index>(dofs.dof_of_vertex.size()))};
    for (std::size_t k = 0; k < dofs.size(); ++k)
        u.values(static_cast<Eigen::Index>(dofs.vertex_of_dof[k])) = interior(static_cast<Eigen::Index>(k));
    return u;
}

FEFunction FEFunction::interpolate(const SimplicialMesh& mesh, const std::function<double(const Vec&)>& g)
{
    FEFunction u = zero(mesh);
    for (std::size_t i = 0; i < mesh.num_vertices(); ++i) u.values(static_cast<Eigen::Index>(i)) = g(mesh.vertex(i));
    return u;
}

Vector FEFunction::restrict_to(const DofMap& dofs) const
{
    Vector out(static_cast<Eigen::Index>(dofs.size()));
    for (std::size_t k = 0; k < dofs.size(); ++k)
        out(static_cast<Eigen::Index>(k)) = values(static_cast<Eigen::Index>(dofs.vertex_of_dof[k]));
    return out;
}

ElementBasis ElementBasis::build(const SimplicialMesh& mesh, std::size_t k, const QuadratureRule& rule)
{
    ElementBasis eb;
    eb.rule = &rule;
    eb.geometry = element_geometry(mesh, k);
    const auto el = mesh.element(k);
    std::vector<Vec> verts;
    for (auto v : el) verts.push_back(mesh.vertex(v));
    eb.points.reserve(rule.size());
    for (const auto& lambda : rule.points) eb.points.push_back(map_point(verts, lambda));
    return eb;
}

namespace {

ElementSystem element_system_impl(const Coefficients& coeffs, const ElementBasis& eb, std::size_t k,
                                  std::size_t* reaction_violations)
{
    const int nb = eb.num_basis();
    ElementSystem es{Eigen::MatrixXd::Zero(nb, nb), Eigen::VectorXd::Zero(nb)};
    std::vector<Vec> grads;
    for (int i = 0; i < nb; ++i) grads.push_back(eb.grad(i));

    for (std::size_t q = 0; q < eb.points.size(); ++q) {
        const Vec& x = eb.points[q];
        const double w = eb.weight(q);
        const double a = coeffs.a(x);
        if (a < coeffs.a0)
            throw CoefficientError("diffusion coefficient " + std::to_string(a) + " below a0 = " +
                                   std::to_string(coeffs.a0) + " in element " + std::to_string(k));
        const Vec b = coeffs.b(x);
        const double c = coeffs.c(x);
        const double f = coeffs.f(x);
        if (reaction_violations && coeffs.grad_b && c - 0.5 * coeffs.grad_b(x).trace() < 0.0) ++*reaction_violations;
        for (int i = 0; i < nb; ++i) {
            const double phi_i = eb.value(q, i);
            es.load(i) += w * f * phi_i;
            for (int j = 0; j < nb; ++j) {
                es.matrix(i, j) +=
                    w * (a * grads[j].dot(grads[i]) + b.dot(grads[j]) * phi_i + c * eb.value(q, j) * phi_i);
            }
        }
    }
    return es;
}

}  // namespace

ElementSystem element_system(const SimplicialMesh& mesh, const Coefficients& coeffs, std::size_t k,
                             const QuadratureRule& rule)
{
    return element_system_impl(coeffs, ElementBasis::build(mesh, k, rule), k, nullptr);
}

SparseSystem assemble_primal(const SimplicialMesh& mesh, const Coefficients& coeffs)
{
    return assemble_primal(mesh, coeffs, default_rule(mesh.dim()));
}

SparseSystem assemble_primal(const SimplicialMesh& mesh, const Coefficients& coeffs, const QuadratureRule& rule)
{
    if (coeffs.dim != mesh.dim()) throw ConfigError("coefficient dimension does not match the mesh");
    SparseSystem sys;
    sys.dofs = DofMap::interior(mesh);
    const auto n = static_cast<Eigen::Index>(sys.dofs.size());
    sys.rhs = Vector::Zero(n);

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(mesh.num_elements() * static_cast<std::size_t>((mesh.dim() + 1) * (mesh.dim() + 1)));
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        const auto eb = ElementBasis::build(mesh, k, rule);
        const auto es = element_system_impl(coeffs, eb, k, &sys.reaction_violations);
        const auto el = mesh.element(k);
        for (std::size_t i = 0; i < el.size(); ++i) {
            const auto row = sys.dofs.dof_of_vertex[el[i]];
            if (row == DofMap::kConstrained) continue;
            sys.rhs(row) += es.load(static_cast<Eigen::Index>(i));
            for (std::size_t j = 0; j < el.size(); ++j) {
                const auto col = sys.dofs.dof_of_vertex[el[j]];
                if (col == DofMap::kConstrained) continue;
                triplets.emplace_back(row, col, es.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
            }
        }
    }
    sys.matrix.resize(n, n);
    sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
    sys.matrix.prune(0.0);
    sys.matrix.makeCompressed();
    return sys;
}

Vector solve(const SparseSystem& system, SolverOptions options)
{
    return LinearSolver(system.matrix, options).solve(system.rhs);
}

PrimalSolution solve_primal(const SimplicialMesh& mesh, const Coefficients& coeffs, SolverOptions options)
{
    PrimalSolution p;
    p.system = assemble_primal(mesh, coeffs);
    p.solver = std::make_shared<const LinearSolver>(p.system.matrix, options);
    p.u = FEFunction::from_dofs(p.system.dofs, p.solver->solve(p.system.rhs));
    return p;
}

FEFunction solve_bvp(const SimplicialMesh& mesh, const Coefficients& coeffs, SolverOptions options)
{
    return solve_primal(mesh, coeffs, options).u;
}

Vec element_gradient(const SimplicialMesh& mesh, const ElementGeometry& geom, const FEFunction& u, std::size_t k)
{
    const auto el = mesh.element(k);
    Vec g = Vec::Zero(mesh.dim());
    for (std::size_t i = 0; i < el.size(); ++i)
        g += u.values(static_cast<Eigen::Index>(el[i])) * geom.grad_phi(static_cast<int>(i));
    return g;
}

double h1_seminorm(const SimplicialMesh& mesh, const FEFunction& u)
{
    double sum = 0.0;
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        const auto g = element_geometry(mesh, k);
        sum += g.volume * element_gradient(mesh, g, u, k).squaredNorm();
    }
    return std::sqrt(sum);
}

double l2_norm(const SimplicialMesh& mesh, const FEFunction& u)
{
    const auto& rule = default_rule(mesh.dim());
    double sum = 0.0;
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        const auto eb = ElementBasis::build(mesh, k, rule);
        const auto el = mesh.element(k);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            double v = 0.0;
            for (std::size_t i = 0; i < el.size(); ++i)
                v += u.values(static_cast<Eigen::Index>(el[i])) * eb.value(q, static_cast<int>(i));
            sum += eb.weight(q) * v * v;
        }
    }
    return std::sqrt(sum);
}

double h1_error(const SimplicialMesh& mesh, const FEFunction& u, const std::function<Vec(const Vec&)>& exact_grad)
{
    const auto& rule = default_rule(mesh.dim());
    double sum = 0.0;
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        const auto eb = ElementBasis::build(mesh, k, rule);
        const Vec gh = element_gradient(mesh, eb.geometry, u, k);
        for (std::size_t q = 0; q < rule.size(); ++q) sum += eb.weight(q) * (gh - exact_grad(eb.points[q])).squaredNorm();
    }
    return std::sqrt(sum);
}

double l2_norm(const SimplicialMesh& mesh, const std::function<double(const Vec&)>& g)
{
    const auto& rule = default_rule(mesh.dim());
    double sum = 0.0;
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        const auto eb = ElementBasis::build(mesh, k, rule);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double v = g(eb.points[q]);
            sum += eb.weight(q) * v * v;
        }
    }
    return std::sqrt(sum);
}

}  // namespace meshsens
