#include "meshsens/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace meshsens {

namespace {

QuadratureRule gauss_interval_rule()
{
    QuadratureRule r;
    r.dim = 1;
    r.degree = 5;
    std::vector<double> x, w;
    gauss_legendre01(3, x, w);
    for (std::size_t q = 0; q < x.size(); ++q) {
        r.points.push_back(Bary{{1.0 - x[q], x[q]}});
        r.weights.push_back(w[q]);
    }
    return r;
}

QuadratureRule triangle_six_point_rule()
{
    // Symmetric degree-4 rule: two orbits of three points each.
    constexpr double a1 = 0.44594849091596488632;
    constexpr double w1 = 0.22338158967801146570;
    constexpr double a2 = 0.09157621350977074346;
    constexpr double w2 = 0.10995174365532186764;

    QuadratureRule r;
    r.dim = 2;
    r.degree = 4;
    for (const auto& [a, w] : {std::pair{a1, w1}, std::pair{a2, w2}}) {
        const double b = 1.0 - 2.0 * a;
        r.points.push_back(Bary{{a, a, b}});
        r.points.push_back(Bary{{a, b, a}});
        r.points.push_back(Bary{{b, a, a}});
        r.weights.insert(r.weights.end(), 3, w);
    }
    return r;
}

}  // namespace

void gauss_legendre01(int n, std::vector<double>& nodes, std::vector<double>& weights)
{
    if (n < 1) throw std::invalid_argument("Gauss-Legendre rule needs n >= 1");
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        // Newton iteration on P_n from the Chebyshev-like initial guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double pn = p1;
            dp = n * (x * pn - p0) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const auto idx = static_cast<std::size_t>(i);
        nodes[idx] = 0.5 * (1.0 - x);
        weights[idx] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
}

QuadratureRule collapsed_gauss_rule(int dim, int n)
{
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("collapsed rule: dimension must be 1..3");
    std::vector<double> x, w;
    gauss_legendre01(n, x, w);

    QuadratureRule r;
    r.dim = dim;
    r.degree = 2 * n - dim;
    double fact = 1.0;
    for (int i = 2; i <= dim; ++i) fact *= i;

    const std::size_t m = x.size();
    std::size_t total = 1;
    for (int i = 0; i < dim; ++i) total *= m;
    for (std::size_t flat = 0; flat < total; ++flat) {
        // Map the unit cube to the simplex: y_0 = u_0, y_i = (1 - sum_{j<i} y_j) u_i.
        std::size_t rem = flat;
        Bary lambda = Bary::Zero(dim + 1);
        double remaining = 1.0;
        double weight = fact;
        for (int i = 0; i < dim; ++i) {
            const std::size_t k = rem % m;
            rem /= m;
            const double yi = remaining * x[k];
            weight *= w[k] * remaining;
            lambda(i + 1) = yi;
            remaining -= yi;
        }
        lambda(0) = remaining;
        r.points.push_back(lambda);
        r.weights.push_back(weight);
    }
    return r;
}

const QuadratureRule& default_rule(int dim)
{
    static const QuadratureRule rules[] = {gauss_interval_rule(), triangle_six_point_rule(), collapsed_gauss_rule(3, 4)};
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("no quadrature rule for dimension " + std::to_string(dim));
    return rules[dim - 1];
}

}  // namespace meshsens
