#pragma once

#include <memory>

#include <Eigen/Sparse>

namespace meshsens {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

struct SolverOptions {
    enum class Method { Auto, Direct, Iterative };
    Method method = Method::Auto;
    /// Required relative residual ||Ax - b|| / ||b||.
    double tolerance = 1e-10;
    int max_iterations = 20000;
    /// Auto uses the direct factorization below this many unknowns.
    Eigen::Index direct_limit = 200000;
};

/// Factorizes (or preconditions) a square sparse matrix once and solves for many
/// right-hand sides. Sparse LU below the size limit, ILUT-preconditioned BiCGSTAB above.
/// Every solve is checked against the residual contract; failures raise SolverError.
class LinearSolver {
public:
    explicit LinearSolver(const SparseMatrix& matrix, SolverOptions options = {});
    ~LinearSolver();
    LinearSolver(const LinearSolver&) = delete;
    LinearSolver& operator=(const LinearSolver&) = delete;

    [[nodiscard]] Vector solve(const Vector& rhs) const;
    [[nodiscard]] bool is_direct() const noexcept;
    [[nodiscard]] Eigen::Index size() const noexcept { return matrix_.rows(); }

private:
    struct Impl;
    SparseMatrix matrix_;
    SolverOptions options_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace meshsens
