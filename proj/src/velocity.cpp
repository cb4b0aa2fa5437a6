#include "meshsens/velocity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "meshsens/errors.hpp"
#include "meshsens/random.hpp"

namespace meshsens {

using std::numbers::pi;

VelocityField VelocityField::analytic(std::string name, int dim, std::function<Vec(const Vec&)> value,
                                      std::function<Mat(const Vec&)> gradient, std::optional<double> sup_norm,
                                      std::optional<double> grad_sup_norm)
{
    VelocityField f;
    f.kind = Kind::Analytic;
    f.name = std::move(name);
    f.dim = dim;
    f.value = std::move(value);
    f.gradient = std::move(gradient);
    f.sup_norm = sup_norm;
    f.grad_sup_norm = grad_sup_norm;
    return f;
}

VelocityField VelocityField::random(std::uint64_t seed, int dim)
{
    VelocityField f;
    f.kind = Kind::NodalRandom;
    f.name = "random";
    f.dim = dim;
    f.seed = seed;
    f.sup_norm = std::sqrt(static_cast<double>(dim));
    return f;
}

std::vector<std::string> velocity_catalog_names()
{
    return {"zero", "paper-smooth", "translation", "identity", "rotation"};
}

VelocityField velocity_from_catalog(const std::string& name, int dim)
{
    if (name == "zero") {
        return VelocityField::analytic(
            name, dim, [dim](const Vec&) { return Vec(Vec::Zero(dim)); },
            [dim](const Vec&) { return Mat(Mat::Zero(dim, dim)); }, 0.0, 0.0);
    }
    if (name == "translation") {
        // Constant (1, 1/2, 1/4) truncated to d components.
        Vec c(dim);
        for (int i = 0; i < dim; ++i) c(i) = std::ldexp(1.0, -i);
        return VelocityField::analytic(
            name, dim, [c](const Vec&) { return c; }, [dim](const Vec&) { return Mat(Mat::Zero(dim, dim)); },
            c.norm(), 0.0);
    }
    if (name == "identity") {
        // X'(x) = x on the unit cube.
        return VelocityField::analytic(
            name, dim, [](const Vec& x) { return x; }, [dim](const Vec&) { return Mat(Mat::Identity(dim, dim)); },
            std::sqrt(static_cast<double>(dim)), 1.0);
    }
    if (dim != 2) throw ConfigError("velocity field '" + name + "' is only defined in 2D");
    if (name == "paper-smooth") {
        auto value = [](const Vec& x) {
            const double s = std::sin(pi * x(0)) * std::sin(2 * pi * x(1));
            return Vec(Vec::Constant(2, s));
        };
        auto gradient = [](const Vec& x) {
            const double sx = pi * std::cos(pi * x(0)) * std::sin(2 * pi * x(1));
            const double sy = 2 * pi * std::sin(pi * x(0)) * std::cos(2 * pi * x(1));
            Mat g(2, 2);
            g << sx, sy, sx, sy;
            return g;
        };
        return VelocityField::analytic(name, 2, value, gradient, std::sqrt(2.0), 2.0 * std::sqrt(2.0) * pi);
    }
    if (name == "rotation") {
        // Solid rotation about the square's center: X'(x) = (-(y - 1/2), x - 1/2).
        auto value = [](const Vec& x) {
            Vec v(2);
            v << -(x(1) - 0.5), x(0) - 0.5;
            return v;
        };
        auto gradient = [](const Vec&) {
            Mat g(2, 2);
            g << 0, -1, 1, 0;
            return g;
        };
        return VelocityField::analytic(name, 2, value, gradient, std::sqrt(0.5), 1.0);
    }
    throw ConfigError("unknown velocity field '" + name + "'");
}

void estimate_norms(VelocityField& field, int samples_per_dim)
{
    if (field.kind != VelocityField::Kind::Analytic || !field.value)
        throw ConfigError("norm estimation needs an analytic velocity field");
    const int d = field.dim;
    const int n = std::max(2, samples_per_dim);
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(n);

    double sup = 0.0, grad_sup = 0.0;
    for (std::size_t flat = 0; flat < total; ++flat) {
        Vec x(d);
        std::size_t rem = flat;
        for (int i = 0; i < d; ++i) {
            x(i) = static_cast<double>(rem % static_cast<std::size_t>(n)) / (n - 1);
            rem /= static_cast<std::size_t>(n);
        }
        sup = std::max(sup, field.value(x).norm());
        if (field.gradient) grad_sup = std::max(grad_sup, spectral_norm(field.gradient(x)));
    }
    field.sup_norm = sup;
    field.grad_sup_norm = field.gradient ? std::optional<double>(grad_sup) : std::nullopt;
    field.norms_estimated = true;
}

double NodalVelocity::max_norm() const
{
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, v.norm());
    return m;
}

NodalVelocity NodalVelocity::scaled(double alpha) const
{
    NodalVelocity out = *this;
    for (auto& v : out.values) v *= alpha;
    return out;
}

NodalVelocity NodalVelocity::plus(const NodalVelocity& other) const
{
    if (other.values.size() != values.size()) throw std::invalid_argument("nodal velocity size mismatch");
    NodalVelocity out = *this;
    for (std::size_t i = 0; i < values.size(); ++i) out.values[i] += other.values[i];
    return out;
}

NodalVelocity NodalVelocity::zero(const SimplicialMesh& mesh)
{
    return {mesh.dim(), std::vector<Vec>(mesh.num_vertices(), Vec::Zero(mesh.dim()))};
}

NodalVelocity sample_nodal_velocity(const SimplicialMesh& mesh, const VelocityField& field)
{
    const int d = mesh.dim();
    if (field.dim != d) throw ConfigError("velocity field dimension does not match the mesh");
    NodalVelocity out = NodalVelocity::zero(mesh);
    for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
        if (mesh.is_boundary(i)) continue;
        if (field.kind == VelocityField::Kind::NodalRandom) {
            for (int c = 0; c < d; ++c)
                out.values[i](c) = rng::symmetric_unit(field.seed, i * static_cast<std::uint64_t>(d) + static_cast<std::uint64_t>(c));
        } else {
            out.values[i] = field.value(mesh.vertex(i));
        }
    }
    return out;
}

SimplicialMesh deform_mesh(const SimplicialMesh& mesh, const NodalVelocity& velocity, double t)
{
    if (!(t >= 0.0)) throw std::invalid_argument("deformation step t must be nonnegative");
    if (velocity.size() != mesh.num_vertices()) throw std::invalid_argument("nodal velocity size mismatch");
    std::vector<Vec> moved = mesh.vertices();
    for (std::size_t i = 0; i < moved.size(); ++i) moved[i] += t * velocity[i];
    return mesh.with_vertices(std::move(moved));
}

ElementDeformation element_deformation(const SimplicialMesh& mesh, const ElementGeometry& geom,
                                       const NodalVelocity& velocity, std::size_t k)
{
    const auto el = mesh.element(k);
    const int d = mesh.dim();
    ElementDeformation out;
    out.edot.resize(d, d);
    for (int i = 0; i < d; ++i) out.edot.col(i) = velocity[el[static_cast<std::size_t>(i) + 1]] - velocity[el[0]];
    // E_K^{-1} = (E_K^{-T})^T
    out.s = out.edot * geom.inv_transpose.transpose();
    out.div = out.s.trace();
    return out;
}

Vec interpolate_velocity(const SimplicialMesh& mesh, const NodalVelocity& velocity, std::size_t k, const Bary& lambda)
{
    const auto el = mesh.element(k);
    Vec v = Vec::Zero(mesh.dim());
    for (std::size_t i = 0; i < el.size(); ++i) v += lambda(static_cast<Eigen::Index>(i)) * velocity[el[i]];
    return v;
}

DeformationJacobian deformation_jacobian(const SimplicialMesh& base, const SimplicialMesh& deformed, std::size_t k)
{
    if (!base.same_connectivity(deformed)) throw MeshError("deformation jacobian: meshes have different connectivity");
    const auto g0 = element_geometry(base, k);
    DeformationJacobian out;
    out.matrix = edge_matrix(deformed, k) * g0.inv_transpose.transpose();
    out.det = out.matrix.determinant();
    return out;
}

bool LemmaRecord::all_valid_bounds_hold(double rel_slack) const
{
    auto le = [rel_slack](double lhs, double rhs) { return lhs <= rhs * (1.0 + rel_slack) + 1e-300; };
    bool ok = le(inv_edge_norm, inv_edge_bound) && le(div_abs, nonsmooth_div_bound) &&
              le(edot_norm, nonsmooth_edot_bound) && le(edot_norm * inv_edge_norm, nonsmooth_product_bound);
    if (smooth_edot_bound) ok = ok && le(edot_norm, *smooth_edot_bound);
    if (smooth_product_bound) ok = ok && le(edot_norm * inv_edge_norm, *smooth_product_bound);
    if (smooth_div_bound) ok = ok && le(div_abs, *smooth_div_bound);
    return ok;
}

std::vector<LemmaRecord> lemma_bounds_report(const SimplicialMesh& mesh, const NodalVelocity& velocity,
                                             const LemmaNorms& norms)
{
    const double d = mesh.dim();
    const double min_height = mesh_quality(mesh).min_height;
    std::vector<LemmaRecord> out;
    out.reserve(mesh.num_elements());
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        const auto g = element_geometry(mesh, k);
        const auto def = element_deformation(mesh, g, velocity, k);
        LemmaRecord r;
        r.inv_edge_norm = spectral_norm(g.inv_transpose);
        r.edot_norm = spectral_norm(def.edot);
        r.div_abs = std::abs(def.div);
        r.inv_edge_bound = std::sqrt(d) / g.min_height;
        if (norms.grad_sup_norm) {
            const double gn = *norms.grad_sup_norm;
            r.smooth_edot_bound = std::sqrt(d) * g.diameter * gn;
            r.smooth_product_bound = d * g.diameter / g.min_height * gn;
            r.smooth_div_bound = d * g.diameter / g.min_height * gn;
        }
        r.nonsmooth_div_bound = (d + 1) / min_height * norms.sup_norm;
        r.stated_nonsmooth_edot_bound = std::sqrt(2 * d) * norms.sup_norm;
        r.stated_nonsmooth_product_bound = d * std::sqrt(2.0) / g.min_height * norms.sup_norm;
        r.nonsmooth_edot_bound = 2 * std::sqrt(d) * norms.sup_norm;
        r.nonsmooth_product_bound = 2 * d / g.min_height * norms.sup_norm;
        out.push_back(r);
    }
    return out;
}

}  // namespace meshsens
