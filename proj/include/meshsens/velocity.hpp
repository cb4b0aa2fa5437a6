#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "meshsens/mesh.hpp"
#include "meshsens/types.hpp"

namespace meshsens {

/// Mesh velocity field: either an analytic map x -> X'(x) or seeded random nodal samples.
struct VelocityField {
    enum class Kind { Analytic, NodalRandom };

    Kind kind = Kind::Analytic;
    std::string name;
    int dim = 0;

    std::function<Vec(const Vec&)> value;
    /// Jacobian, entry (i, j) = d X'_i / d x_j. Empty for fields without one.
    std::function<Mat(const Vec&)> gradient;

    /// sup |X'| (pointwise Euclidean norm).
    std::optional<double> sup_norm;
    /// sup ||grad X'||_2. Absent for nonsmooth fields.
    std::optional<double> grad_sup_norm;
    /// True when the norms came from grid sampling rather than closed form.
    bool norms_estimated = false;

    std::uint64_t seed = 0;

    [[nodiscard]] bool is_smooth() const noexcept { return kind == Kind::Analytic && grad_sup_norm.has_value(); }

    static VelocityField analytic(std::string name, int dim, std::function<Vec(const Vec&)> value,
                                  std::function<Mat(const Vec&)> gradient, std::optional<double> sup_norm,
                                  std::optional<double> grad_sup_norm);
    /// Per-component samples uniform in (-1, 1) drawn from stream `seed`;
    /// component c of vertex i uses counter i * dim + c.
    static VelocityField random(std::uint64_t seed, int dim);
};

/// Named analytic fields: "zero", "paper-smooth", "translation", "identity", "rotation".
///
/// "paper-smooth" is X'(x, y) = (s, s) with s = sin(pi x) sin(2 pi y);
/// sup |X'| = sqrt(2) and sup ||grad X'||_2 = 2 sqrt(2) pi.
[[nodiscard]] VelocityField velocity_from_catalog(const std::string& name, int dim);
[[nodiscard]] std::vector<std::string> velocity_catalog_names();

/// Fills sup_norm / grad_sup_norm by sampling on a uniform grid over [0,1]^d
/// (512 points per direction in 2D) and marks the field as estimated.
void estimate_norms(VelocityField& field, int samples_per_dim = 512);

/// Nodal velocities x'_i, one d-vector per vertex.
struct NodalVelocity {
    int dim = 0;
    std::vector<Vec> values;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] const Vec& operator[](std::size_t i) const { return values[i]; }
    /// max_i |x'_i|, equal to the sup norm of the piecewise-linear interpolant.
    [[nodiscard]] double max_norm() const;

    [[nodiscard]] NodalVelocity scaled(double alpha) const;
    [[nodiscard]] NodalVelocity plus(const NodalVelocity& other) const;
    static NodalVelocity zero(const SimplicialMesh& mesh);
};

/// x'_i = X'(x_i) at interior vertices, zero at boundary vertices.
[[nodiscard]] NodalVelocity sample_nodal_velocity(const SimplicialMesh& mesh, const VelocityField& field);

/// Moves every vertex to x_i + t x'_i. Throws InvertedElementError naming the
/// first element that lost positive orientation.
[[nodiscard]] SimplicialMesh deform_mesh(const SimplicialMesh& mesh, const NodalVelocity& velocity, double t);

struct ElementDeformation {
    Mat edot;        ///< [x'_1 - x'_0, ..., x'_d - x'_0]
    Mat s;           ///< edot * E_K^{-1}
    double div = 0;  ///< div of the interpolated velocity on K, trace(s)
};

[[nodiscard]] ElementDeformation element_deformation(const SimplicialMesh& mesh, const ElementGeometry& geom,
                                                     const NodalVelocity& velocity, std::size_t k);

/// Interpolated velocity on element k at barycentric point lambda.
[[nodiscard]] Vec interpolate_velocity(const SimplicialMesh& mesh, const NodalVelocity& velocity, std::size_t k,
                                       const Bary& lambda);

struct DeformationJacobian {
    Mat matrix;  ///< E_{K(t)} E_{K(0)}^{-1}
    double det = 0;
};

[[nodiscard]] DeformationJacobian deformation_jacobian(const SimplicialMesh& base, const SimplicialMesh& deformed,
                                                       std::size_t k);

/// Per-element quantities appearing in the edge-matrix and divergence estimates,
/// together with the right-hand sides of those estimates.
struct LemmaRecord {
    double inv_edge_norm = 0;       ///< ||E_K^{-1}||_2
    double edot_norm = 0;           ///< ||E'_K||_2
    double div_abs = 0;             ///< |div X'_h| on K
    double inv_edge_bound = 0;      ///< sqrt(d) / a_K
    std::optional<double> smooth_edot_bound;     ///< sqrt(d) h_K ||grad X'||
    std::optional<double> smooth_product_bound;  ///< d h_K / a_K ||grad X'||
    std::optional<double> smooth_div_bound;      ///< d h_K / a_K ||grad X'||
    double nonsmooth_div_bound = 0;              ///< (d + 1) / min_K a_K ||X'||
    double stated_nonsmooth_edot_bound = 0;      ///< sqrt(2d) ||X'||
    double stated_nonsmooth_product_bound = 0;   ///< d sqrt(2) / a_K ||X'||
    double nonsmooth_edot_bound = 0;             ///< 2 sqrt(d) ||X'||
    double nonsmooth_product_bound = 0;          ///< 2 d / a_K ||X'||

    /// Estimates that hold for every admissible configuration (with a relative slack for rounding).
    [[nodiscard]] bool all_valid_bounds_hold(double rel_slack = 1e-12) const;
};

struct LemmaNorms {
    double sup_norm = 0;                  ///< ||X'||_inf
    std::optional<double> grad_sup_norm;  ///< ||grad X'||_inf
};

[[nodiscard]] std::vector<LemmaRecord> lemma_bounds_report(const SimplicialMesh& mesh, const NodalVelocity& velocity,
                                                           const LemmaNorms& norms);

}  // namespace meshsens
