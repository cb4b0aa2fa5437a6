#pragma once

#include <vector>

#include "meshsens/types.hpp"

namespace meshsens {

/// Quadrature rule on the reference d-simplex in barycentric form.
/// Weights sum to one, so that the integral over K is |K| * sum_q w_q g(x_q).
struct QuadratureRule {
    int dim = 0;
    int degree = 0;  ///< polynomials up to this total degree are integrated exactly
    std::vector<Bary> points;
    std::vector<double> weights;

    [[nodiscard]] std::size_t size() const noexcept { return weights.size(); }
};

/// Fixed rule used by assembly: exact for degree 4.
/// d = 1: 3-point Gauss; d = 2: symmetric 6-point rule; d = 3: collapsed 4^3 Gauss product.
[[nodiscard]] const QuadratureRule& default_rule(int dim);

/// Collapsed-coordinate (Duffy) Gauss product rule with n points per direction.
/// Exact for total degree 2n - d. Positive weights.
[[nodiscard]] QuadratureRule collapsed_gauss_rule(int dim, int n);

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre01(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Physical point of barycentric coordinates `lambda` in the simplex with the given vertices.
template <class Vertices>
Vec map_point(const Vertices& vertices, const Bary& lambda)
{
    Vec x = Vec::Zero(vertices[0].size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i) x += lambda(i) * vertices[static_cast<std::size_t>(i)];
    return x;
}

}  // namespace meshsens
