#pragma once

#include <functional>
#include <string>
#include <vector>

#include "meshsens/types.hpp"

namespace meshsens {

/// Sup norms of the PDE coefficients over the domain, as used by the sensitivity bounds.
struct CoefficientNorms {
    double a_sup = 0;       ///< ||a||_inf
    double grad_a_sup = 0;  ///< || |grad a| ||_inf
    double b_sup = 0;       ///< || |b| ||_inf
    double grad_b_sup = 0;  ///< || ||grad b||_2 ||_inf
    double c_sup = 0;       ///< ||c||_inf
};

/// Coefficients of -div(a grad u) + b . grad u + c u = f with u = 0 on the boundary.
///
/// Gradients are optional for solving the primal problem but required for
/// sensitivity assembly. grad_b(x)(i, j) = d b_i / d x_j.
struct Coefficients {
    std::string name;
    int dim = 0;

    std::function<double(const Vec&)> a;
    std::function<Vec(const Vec&)> grad_a;
    std::function<Vec(const Vec&)> b;
    std::function<Mat(const Vec&)> grad_b;
    std::function<double(const Vec&)> c;
    std::function<Vec(const Vec&)> grad_c;
    std::function<double(const Vec&)> f;
    std::function<Vec(const Vec&)> grad_f;

    /// Lower bound of a.
    double a0 = 1.0;
    CoefficientNorms norms;

    /// Exact solution, when known (manufactured problems).
    std::function<double(const Vec&)> exact;
    std::function<Vec(const Vec&)> exact_grad;

    [[nodiscard]] bool has_gradients() const noexcept { return grad_a && grad_b && grad_c && grad_f; }
    [[nodiscard]] bool has_exact_solution() const noexcept { return exact && exact_grad; }

    /// Constant a, b, c, f with zero gradients.
    static Coefficients constant(int dim, double a, const Vec& b, double c, double f);
};

/// Named problems.
///
/// "paper-example": unit square, a = 1, b = (1, 2), c = 0 and f manufactured so
/// that u = sin(2 pi x) sin(3 pi y).
/// "variable-example": smooth nonconstant a, b, c, f exercising every gradient term.
[[nodiscard]] Coefficients coefficients_from_catalog(const std::string& name);
[[nodiscard]] std::vector<std::string> coefficient_catalog_names();

}  // namespace meshsens
