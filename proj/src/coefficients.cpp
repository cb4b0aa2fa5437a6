#include "meshsens/coefficients.hpp"

#include <cmath>
#include <numbers>

#include "meshsens/errors.hpp"

namespace meshsens {

using std::numbers::pi;

Coefficients Coefficients::constant(int dim, double a, const Vec& b, double c, double f)
{
    Coefficients k;
    k.name = "constant";
    k.dim = dim;
    k.a = [a](const Vec&) { return a; };
    k.grad_a = [dim](const Vec&) { return Vec(Vec::Zero(dim)); };
    k.b = [b](const Vec&) { return b; };
    k.grad_b = [dim](const Vec&) { return Mat(Mat::Zero(dim, dim)); };
    k.c = [c](const Vec&) { return c; };
    k.grad_c = [dim](const Vec&) { return Vec(Vec::Zero(dim)); };
    k.f = [f](const Vec&) { return f; };
    k.grad_f = [dim](const Vec&) { return Vec(Vec::Zero(dim)); };
    k.a0 = a;
    k.norms = {.a_sup = std::abs(a), .grad_a_sup = 0, .b_sup = b.norm(), .grad_b_sup = 0, .c_sup = std::abs(c)};
    return k;
}

namespace {

Coefficients paper_example()
{
    Coefficients k = Coefficients::constant(2, 1.0, Vec{{1.0, 2.0}}, 0.0, 0.0);
    k.name = "paper-example";
    // u = sin(2 pi x) sin(3 pi y):  -lap u = 13 pi^2 u,  b . grad u = u_x + 2 u_y.
    k.f = [](const Vec& x) {
        const double s2x = std::sin(2 * pi * x(0)), c2x = std::cos(2 * pi * x(0));
        const double s3y = std::sin(3 * pi * x(1)), c3y = std::cos(3 * pi * x(1));
        return 13 * pi * pi * s2x * s3y + 2 * pi * c2x * s3y + 6 * pi * s2x * c3y;
    };
    k.grad_f = [](const Vec& x) {
        const double s2x = std::sin(2 * pi * x(0)), c2x = std::cos(2 * pi * x(0));
        const double s3y = std::sin(3 * pi * x(1)), c3y = std::cos(3 * pi * x(1));
        Vec g(2);
        g(0) = 26 * pi * pi * pi * c2x * s3y - 4 * pi * pi * s2x * s3y + 12 * pi * pi * c2x * c3y;
        g(1) = 39 * pi * pi * pi * s2x * c3y + 6 * pi * pi * c2x * c3y - 18 * pi * pi * s2x * s3y;
        return g;
    };
    k.exact = [](const Vec& x) { return std::sin(2 * pi * x(0)) * std::sin(3 * pi * x(1)); };
    k.exact_grad = [](const Vec& x) {
        Vec g(2);
        g(0) = 2 * pi * std::cos(2 * pi * x(0)) * std::sin(3 * pi * x(1));
        g(1) = 3 * pi * std::sin(2 * pi * x(0)) * std::cos(3 * pi * x(1));
        return g;
    };
    return k;
}

Coefficients variable_example()
{
    Coefficients k;
    k.name = "variable-example";
    k.dim = 2;
    // a = 2 + sin(pi x) cos(pi y) in [1, 3]
    k.a = [](const Vec& x) { return 2.0 + std::sin(pi * x(0)) * std::cos(pi * x(1)); };
    k.grad_a = [](const Vec& x) {
        return Vec{{pi * std::cos(pi * x(0)) * std::cos(pi * x(1)), -pi * std::sin(pi * x(0)) * std::sin(pi * x(1))}};
    };
    // Divergence-free b = (1 + y, 2 - x).
    k.b = [](const Vec& x) { return Vec{{1.0 + x(1), 2.0 - x(0)}}; };
    k.grad_b = [](const Vec&) {
        Mat g(2, 2);
        g << 0, 1, -1, 0;
        return g;
    };
    k.c = [](const Vec& x) { return 1.0 + x(0) * x(0); };
    k.grad_c = [](const Vec& x) { return Vec{{2.0 * x(0), 0.0}}; };
    k.f = [](const Vec& x) { return 10.0 * std::sin(pi * x(0)) * std::sin(pi * x(1)) + 4.0 * x(0) * x(1); };
    k.grad_f = [](const Vec& x) {
        return Vec{{10.0 * pi * std::cos(pi * x(0)) * std::sin(pi * x(1)) + 4.0 * x(1),
                    10.0 * pi * std::sin(pi * x(0)) * std::cos(pi * x(1)) + 4.0 * x(0)}};
    };
    k.a0 = 1.0;
    k.norms = {.a_sup = 3.0, .grad_a_sup = pi, .b_sup = 2.0 * std::sqrt(2.0), .grad_b_sup = 1.0, .c_sup = 2.0};
    return k;
}

}  // namespace

std::vector<std::string> coefficient_catalog_names() { return {"paper-example", "variable-example"}; }

Coefficients coefficients_from_catalog(const std::string& name)
{
    if (name == "paper-example") return paper_example();
    if (name == "variable-example") return variable_example();
    throw ConfigError("unknown problem '" + name + "'");
}

}  // namespace meshsens
