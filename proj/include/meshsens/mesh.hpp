#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "meshsens/types.hpp"

namespace meshsens {

/// How element vertex orderings with negative signed volume are treated.
enum class Orientation {
    Normalize,  ///< reorder vertices so every element has det(E_K) > 0
    Require,    ///< reject negatively oriented elements with InvertedElementError
};

struct MeshBuildOptions {
    Orientation orientation = Orientation::Normalize;
    /// Reject meshes where a vertex on the topological boundary is not flagged.
    /// Disabled only by test harnesses that treat every vertex as a degree of freedom.
    bool check_boundary_flags = true;
};

/// Conforming simplicial mesh in d = 1, 2 or 3 dimensions.
///
/// Immutable after construction. Every element has d + 1 distinct vertices and
/// strictly positive signed volume under its stored ordering.
class SimplicialMesh {
public:
    /// Validates and builds a mesh. An empty `boundary` vector means "derive the
    /// flags from the topology" (vertices of facets shared by exactly one element).
    static SimplicialMesh create(int dim,
                                 std::vector<Vec> vertices,
                                 std::vector<std::vector<std::size_t>> elements,
                                 std::vector<bool> boundary = {},
                                 MeshBuildOptions options = {});

    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t num_vertices() const noexcept { return vertices_.size(); }
    [[nodiscard]] std::size_t num_elements() const noexcept { return connectivity_.size() / stride(); }

    [[nodiscard]] const Vec& vertex(std::size_t i) const { return vertices_[i]; }
    [[nodiscard]] const std::vector<Vec>& vertices() const noexcept { return vertices_; }
    [[nodiscard]] std::span<const std::size_t> element(std::size_t k) const
    {
        return {connectivity_.data() + k * stride(), stride()};
    }
    [[nodiscard]] bool is_boundary(std::size_t i) const { return boundary_[i]; }
    [[nodiscard]] const std::vector<bool>& boundary_flags() const noexcept { return boundary_; }
    [[nodiscard]] std::size_t num_interior_vertices() const noexcept;

    /// Same connectivity and flags, new coordinates. Orientation is required, not normalized.
    [[nodiscard]] SimplicialMesh with_vertices(std::vector<Vec> vertices) const;

    [[nodiscard]] bool same_connectivity(const SimplicialMesh& other) const noexcept;

    friend bool operator==(const SimplicialMesh&, const SimplicialMesh&);

private:
    SimplicialMesh() = default;
    [[nodiscard]] std::size_t stride() const noexcept { return static_cast<std::size_t>(dim_) + 1; }

    int dim_ = 0;
    std::vector<Vec> vertices_;
    std::vector<std::size_t> connectivity_;
    std::vector<bool> boundary_;
};

/// Per-element geometric quantities derived from the edge matrix
/// E_K = [x_1 - x_0, ..., x_d - x_0].
struct ElementGeometry {
    Mat edge_matrix;
    /// E_K^{-T}; column i-1 is the gradient of the barycentric basis function of vertex i.
    Mat inv_transpose;
    /// Gradient of the basis function of vertex 0 (minus the column sum of inv_transpose).
    Vec grad_phi0;
    double det = 0.0;
    double volume = 0.0;
    /// Longest edge.
    double diameter = 0.0;
    /// Smallest vertex-to-opposite-facet distance, min_i 1/|grad phi_i|.
    double min_height = 0.0;

    [[nodiscard]] int dim() const noexcept { return static_cast<int>(edge_matrix.rows()); }
    /// Gradient of the local basis function of vertex i, i = 0..d.
    [[nodiscard]] Vec grad_phi(int i) const
    {
        return i == 0 ? grad_phi0 : Vec(inv_transpose.col(i - 1));
    }

    /// Geometry of the simplex spanned by `vertices` (d + 1 points in R^d).
    /// Throws DegenerateElementError or InvertedElementError tagged with `element_index`.
    static ElementGeometry from_vertices(std::span<const Vec> vertices, std::size_t element_index = 0);
};

[[nodiscard]] ElementGeometry element_geometry(const SimplicialMesh& mesh, std::size_t k);

/// Edge matrix only; no validity checks.
[[nodiscard]] Mat edge_matrix(const SimplicialMesh& mesh, std::size_t k);

struct MeshQuality {
    double max_aspect = 0.0;      ///< max_K h_K / a_K
    double min_height = 0.0;      ///< min_K a_K
    double max_diameter = 0.0;    ///< max_K h_K
    double total_volume = 0.0;
};

[[nodiscard]] MeshQuality mesh_quality(const SimplicialMesh& mesh);

/// Unit square split into n x n cells, each cell cut into four triangles by its
/// diagonals. Corner vertices come first (row-major), then one center per cell.
[[nodiscard]] SimplicialMesh build_structured_mesh(int n);

/// ASCII mesh format:
///
///     meshsens v1 <d> <nv> <ne>
///     <x_1> ... <x_d> <boundary 0|1>      (nv lines)
///     <i_0> ... <i_d>                     (ne lines, zero-based)
///
/// Anything after '#' on a line is ignored. Coordinates are written in shortest
/// round-trip decimal form, so write followed by read reproduces them exactly.
void write_mesh(const SimplicialMesh& mesh, const std::filesystem::path& path);
[[nodiscard]] SimplicialMesh read_mesh(const std::filesystem::path& path);

void write_mesh(const SimplicialMesh& mesh, std::ostream& out);
[[nodiscard]] SimplicialMesh read_mesh(std::istream& in);

}  // namespace meshsens
