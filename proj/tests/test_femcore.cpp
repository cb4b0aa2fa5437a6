#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "meshsens/errors.hpp"
#include "meshsens/femcore.hpp"
#include "oracles.hpp"

using namespace meshsens;
using std::numbers::pi;

namespace {

Vec v2(double x, double y)
{
    Vec v(2);
    v << x, y;
    return v;
}

SimplicialMesh reference_triangle() { return oracle::harness_mesh({v2(0, 0), v2(1, 0), v2(0, 1)}); }

Coefficients laplace(int d, std::function<double(const Vec&)> f)
{
    auto c = Coefficients::constant(d, 1.0, Vec::Zero(d), 0.0, 0.0);
    c.f = std::move(f);
    return c;
}

std::vector<double> rates(const std::vector<double>& e)
{
    std::vector<double> r;
    for (std::size_t i = 1; i < e.size(); ++i) r.push_back(std::log2(e[i - 1] / e[i]));
    return r;
}

}  // namespace

TEST(ElementSystem, ReferenceStiffness)
{
    const auto mesh = reference_triangle();
    const auto es = element_system(mesh, Coefficients::constant(2, 1.0, Vec::Zero(2), 0.0, 0.0), 0, default_rule(2));
    Eigen::Matrix3d expected;
    expected << 1, -0.5, -0.5, -0.5, 0.5, 0, -0.5, 0, 0.5;
    EXPECT_LT((es.matrix - expected).norm(), 1e-15);
    EXPECT_EQ(es.load.norm(), 0.0);
}

TEST(ElementSystem, MassMatrixMatchesMoments)
{
    std::mt19937_64 gen(1);
    for (int d = 1; d <= 3; ++d) {
        const auto mesh = oracle::harness_mesh(oracle::random_simplex(gen, d));
        const double vol = element_geometry(mesh, 0).volume;
        const auto es = element_system(mesh, Coefficients::constant(d, 0.0, Vec::Zero(d), 1.0, 2.0), 0, default_rule(d));
        for (int i = 0; i <= d; ++i) {
            for (int j = 0; j <= d; ++j) {
                std::vector<int> alpha(std::size_t(d) + 1, 0);
                ++alpha[std::size_t(i)];
                ++alpha[std::size_t(j)];
                EXPECT_NEAR(es.matrix(i, j), oracle::barycentric_moment(alpha, vol), 1e-15);
            }
            std::vector<int> alpha(std::size_t(d) + 1, 0);
            alpha[std::size_t(i)] = 1;
            EXPECT_NEAR(es.load(i), 2.0 * oracle::barycentric_moment(alpha, vol), 1e-15);
        }
    }
    // the familiar 2D form |K|/12 [[2,1,1],[1,2,1],[1,1,2]]
    const auto es = element_system(reference_triangle(), Coefficients::constant(2, 0.0, Vec::Zero(2), 1.0, 0.0), 0,
                                   default_rule(2));
    Eigen::Matrix3d m = Eigen::Matrix3d::Constant(1.0) + Eigen::Matrix3d::Identity();
    EXPECT_LT((es.matrix - m * (0.5 / 12)).norm(), 1e-15);
}

TEST(ElementSystem, ConvectionEntries)
{
    std::mt19937_64 gen(2);
    for (int d = 1; d <= 3; ++d) {
        const auto mesh = oracle::harness_mesh(oracle::random_simplex(gen, d));
        const auto g = element_geometry(mesh, 0);
        const Vec b = Vec::LinSpaced(d, 1.0, -2.0);
        const auto es = element_system(mesh, Coefficients::constant(d, 0.0, b, 0.0, 0.0), 0, default_rule(d));
        for (int i = 0; i <= d; ++i)
            for (int j = 0; j <= d; ++j)
                EXPECT_NEAR(es.matrix(i, j), g.volume / (d + 1) * b.dot(g.grad_phi(j)), 1e-13);
    }
}

TEST(ElementSystem, QuadraticDiffusionExact)
{
    // integral of 1 + x + y^2 over the reference triangle is 1/2 + 1/6 + 1/12
    auto coeffs = Coefficients::constant(2, 1.0, Vec::Zero(2), 0.0, 0.0);
    coeffs.a = [](const Vec& x) { return 1 + x(0) + x(1) * x(1); };
    const auto mesh = reference_triangle();
    const auto g = element_geometry(mesh, 0);
    const auto es = element_system(mesh, coeffs, 0, default_rule(2));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_NEAR(es.matrix(i, j), 0.75 * g.grad_phi(i).dot(g.grad_phi(j)), 1e-14);
}

TEST(Assembly, SymmetricWithoutConvection)
{
    const auto mesh = build_structured_mesh(6);
    auto coeffs = Coefficients::constant(2, 1.0, Vec::Zero(2), 1.0, 1.0);
    coeffs.a = [](const Vec& x) { return 2 + std::sin(x(0)); };
    const auto sys = assemble_primal(mesh, coeffs);
    EXPECT_EQ(sys.dofs.size(), mesh.num_interior_vertices());
    const SparseMatrix t = sys.matrix.transpose();
    EXPECT_LT((sys.matrix - t).norm(), 1e-14);
    for (Eigen::Index r = 0; r < sys.matrix.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(sys.matrix, r); it; ++it) EXPECT_NE(it.value(), 0.0);
    const auto conv = assemble_primal(mesh, coefficients_from_catalog("paper-example"));
    EXPECT_GT((conv.matrix - SparseMatrix(conv.matrix.transpose())).norm(), 1e-3);
}

TEST(Assembly, DiffusionBelowLowerBoundRejected)
{
    auto coeffs = Coefficients::constant(2, 1.0, Vec::Zero(2), 0.0, 1.0);
    coeffs.a = [](const Vec& x) { return x(0); };
    EXPECT_THROW((void)assemble_primal(build_structured_mesh(4), coeffs), CoefficientError);
}

TEST(Assembly, ReactionConditionCounted)
{
    const auto mesh = build_structured_mesh(3);
    auto coeffs = coefficients_from_catalog("variable-example");
    EXPECT_EQ(assemble_primal(mesh, coeffs).reaction_violations, 0u);
    // b = (3x, 0), c = 0 gives c - div(b)/2 = -3/2 everywhere
    auto bad = Coefficients::constant(2, 1.0, Vec::Zero(2), 0.0, 1.0);
    bad.b = [](const Vec& x) { return v2(3 * x(0), 0); };
    bad.grad_b = [](const Vec&) {
        Mat g = Mat::Zero(2, 2);
        g(0, 0) = 3;
        return g;
    };
    EXPECT_EQ(assemble_primal(mesh, bad).reaction_violations, mesh.num_elements() * default_rule(2).size());
}

TEST(LinearSolver, SmallSystems)
{
    SparseMatrix id(3, 3);
    id.setIdentity();
    Vector e1 = Vector::Unit(3, 0);
    EXPECT_EQ(LinearSolver(id).solve(e1), e1);
    EXPECT_EQ(LinearSolver(id).solve(Vector::Zero(3)), Vector::Zero(3));

    // 1D Poisson with four interior nodes, h = 1/5, load h^2: solution x(1-x)/2
    const int n = 4;
    const double h = 0.2;
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < n; ++i) {
        t.emplace_back(i, i, 2.0);
        if (i > 0) t.emplace_back(i, i - 1, -1.0);
        if (i + 1 < n) t.emplace_back(i, i + 1, -1.0);
    }
    SparseMatrix a(n, n);
    a.setFromTriplets(t.begin(), t.end());
    const Vector rhs = Vector::Constant(n, h * h);
    for (auto method : {SolverOptions::Method::Direct, SolverOptions::Method::Iterative}) {
        const LinearSolver s(a, {.method = method});
        const Vector x = s.solve(rhs);
        for (int i = 0; i < n; ++i) {
            const double xi = (i + 1) * h;
            EXPECT_NEAR(x(i), xi * (1 - xi) / 2, 1e-10);
        }
        EXPECT_EQ(s.is_direct(), method == SolverOptions::Method::Direct);
    }
}

TEST(LinearSolver, FailuresRaise)
{
    SparseMatrix singular(2, 2);
    singular.insert(0, 0) = 1.0;
    EXPECT_THROW((void)LinearSolver(singular).solve(Vector::Ones(2)), SolverError);
    SparseMatrix rect(2, 3);
    EXPECT_THROW(LinearSolver{rect}, SolverError);
    SparseMatrix id(2, 2);
    id.setIdentity();
    EXPECT_THROW((void)LinearSolver(id).solve(Vector::Ones(3)), SolverError);
}

TEST(PrimalSolve, OneDimensionalPoissonNodallyExact)
{
    const auto mesh = oracle::interval_mesh(5);
    const auto u = solve_bvp(mesh, laplace(1, [](const Vec&) { return 1.0; }));
    for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
        const double x = mesh.vertex(i)(0);
        EXPECT_NEAR(u.values(Eigen::Index(i)), x * (1 - x) / 2, 1e-13);
    }
}

TEST(PrimalSolve, ZeroSourceGivesZero)
{
    const auto mesh = build_structured_mesh(5);
    const auto u = solve_bvp(mesh, Coefficients::constant(2, 1.0, v2(1, 2), 0.0, 0.0));
    EXPECT_EQ(u.values.norm(), 0.0);
}

TEST(PrimalSolve, ConvergesAtFirstOrderInTwoDimensions)
{
    const auto coeffs = coefficients_from_catalog("paper-example");
    ASSERT_TRUE(coeffs.has_exact_solution());
    std::vector<double> err;
    for (int n : {10, 20, 40}) {
        const auto mesh = build_structured_mesh(n);
        err.push_back(h1_error(mesh, solve_bvp(mesh, coeffs), coeffs.exact_grad));
    }
    for (double r : rates(err)) EXPECT_NEAR(r, 1.0, 0.1);
}

TEST(PrimalSolve, ConvergesInThreeDimensions)
{
    auto coeffs = laplace(3, [](const Vec& x) {
        return 3 * pi * pi * std::sin(pi * x(0)) * std::sin(pi * x(1)) * std::sin(pi * x(2));
    });
    const auto grad = [](const Vec& x) {
        Vec g(3);
        const double s0 = std::sin(pi * x(0)), s1 = std::sin(pi * x(1)), s2 = std::sin(pi * x(2));
        g << pi * std::cos(pi * x(0)) * s1 * s2, pi * s0 * std::cos(pi * x(1)) * s2, pi * s0 * s1 * std::cos(pi * x(2));
        return g;
    };
    std::vector<double> err;
    for (int n : {4, 8, 16}) {
        const auto mesh = oracle::cube_mesh(n);
        err.push_back(h1_error(mesh, solve_bvp(mesh, coeffs), grad));
    }
    const auto r = rates(err);
    EXPECT_NEAR(r.back(), 1.0, 0.15);
    EXPECT_LT(err.back(), err.front());
}

TEST(PrimalSolve, GalerkinResidualAndStability)
{
    const auto mesh = build_structured_mesh(16);
    for (const auto& name : coefficient_catalog_names()) {
        const auto coeffs = coefficients_from_catalog(name);
        const auto p = solve_primal(mesh, coeffs);
        const Vector x = p.u.restrict_to(p.system.dofs);
        EXPECT_LE((p.system.matrix * x - p.system.rhs).norm(), 1e-10 * p.system.rhs.norm()) << name;
        const double cp = 1 / (std::sqrt(2.0) * pi);
        EXPECT_LE(coeffs.a0 * h1_seminorm(mesh, p.u), cp * l2_norm(mesh, coeffs.f)) << name;
        for (std::size_t i = 0; i < mesh.num_vertices(); ++i)
            if (mesh.is_boundary(i)) EXPECT_EQ(p.u.values(Eigen::Index(i)), 0.0);
    }
}

TEST(PrimalSolve, CoercivityWitness)
{
    const auto mesh = build_structured_mesh(6);
    std::mt19937_64 gen(4);
    std::normal_distribution<double> nd;
    for (const auto& name : coefficient_catalog_names()) {
        const auto coeffs = coefficients_from_catalog(name);
        const auto sys = assemble_primal(mesh, coeffs);
        for (int trial = 0; trial < 100; ++trial) {
            const Vector v = Vector::NullaryExpr(Eigen::Index(sys.dofs.size()), [&] { return nd(gen); });
            const double energy = v.dot(sys.matrix * v);
            const double g = h1_seminorm(mesh, FEFunction::from_dofs(sys.dofs, v));
            EXPECT_GE(energy, coeffs.a0 * g * g * (1 - 1e-12)) << name;
        }
    }
}

TEST(Norms, KnownValues)
{
    const auto mesh = build_structured_mesh(7);
    const auto x = FEFunction::interpolate(mesh, [](const Vec& p) { return p(0); });
    EXPECT_NEAR(h1_seminorm(mesh, x), 1.0, 1e-13);
    EXPECT_NEAR(h1_error(mesh, x, [](const Vec&) { return v2(1, 0); }), 0.0, 1e-13);
    EXPECT_NEAR(l2_norm(mesh, x), std::sqrt(1.0 / 3.0), 1e-13);
    EXPECT_NEAR(l2_norm(mesh, [](const Vec& p) { return p(0) * p(1); }), 1.0 / 3.0, 1e-13);
    EXPECT_EQ(h1_seminorm(mesh, FEFunction::zero(mesh)), 0.0);
    const auto g = element_gradient(mesh, element_geometry(mesh, 3), x, 3);
    EXPECT_LT((g - v2(1, 0)).norm(), 1e-13);
}

TEST(DofMap, RoundTrip)
{
    const auto mesh = build_structured_mesh(4);
    const auto dofs = DofMap::interior(mesh);
    EXPECT_EQ(dofs.size(), mesh.num_interior_vertices());
    const Vector v = Vector::LinSpaced(Eigen::Index(dofs.size()), 1, 2);
    const auto f = FEFunction::from_dofs(dofs, v);
    EXPECT_EQ(f.restrict_to(dofs), v);
    for (std::size_t i = 0; i < mesh.num_vertices(); ++i)
        EXPECT_EQ(dofs.dof_of_vertex[i] == DofMap::kConstrained, mesh.is_boundary(i));
}
