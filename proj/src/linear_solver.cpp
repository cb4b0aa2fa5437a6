#include "meshsens/linear_solver.hpp"

#include <string>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include "meshsens/errors.hpp"

namespace meshsens {

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

struct LinearSolver::Impl {
    bool direct = true;
    Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>> lu;
    Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>> krylov;
};

LinearSolver::LinearSolver(const SparseMatrix& matrix, SolverOptions options)
    : matrix_(matrix), options_(options), impl_(std::make_unique<Impl>())
{
    if (matrix.rows() != matrix.cols()) throw SolverError("linear solver needs a square matrix", 0.0);
    using Method = SolverOptions::Method;
    impl_->direct = options.method == Method::Direct ||
                    (options.method == Method::Auto && matrix.rows() < options.direct_limit);
    if (matrix.rows() == 0) return;
    if (impl_->direct) {
        ColMatrix col = matrix;
        impl_->lu.analyzePattern(col);
        impl_->lu.factorize(col);
        if (impl_->lu.info() != Eigen::Success)
            throw SolverError("sparse LU factorization failed: " + impl_->lu.lastErrorMessage(), 1.0);
    } else {
        impl_->krylov.setTolerance(options.tolerance * 0.1);
        impl_->krylov.setMaxIterations(options.max_iterations);
        impl_->krylov.compute(matrix_);
        if (impl_->krylov.info() != Eigen::Success) throw SolverError("ILUT preconditioner setup failed", 1.0);
    }
}

LinearSolver::~LinearSolver() = default;

bool LinearSolver::is_direct() const noexcept { return impl_->direct; }

Vector LinearSolver::solve(const Vector& rhs) const
{
    if (rhs.size() != matrix_.rows()) throw SolverError("right-hand side has wrong size", 0.0);
    const double rhs_norm = rhs.norm();
    if (rhs_norm == 0.0) return Vector::Zero(rhs.size());

    Vector x;
    if (impl_->direct) {
        x = impl_->lu.solve(rhs);
        // One step of iterative refinement if the factorization lost accuracy.
        Vector r = rhs - matrix_ * x;
        if (r.norm() > options_.tolerance * rhs_norm) x += impl_->lu.solve(r);
    } else {
        x = impl_->krylov.solve(rhs);
    }
    const double residual = (rhs - matrix_ * x).norm() / rhs_norm;
    if (!(residual <= options_.tolerance))
        throw SolverError("linear solve did not reach tolerance (relative residual " + std::to_string(residual) + ")",
                          residual);
    return x;
}

}  // namespace meshsens
