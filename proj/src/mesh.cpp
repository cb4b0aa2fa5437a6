#include "meshsens/mesh.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>

#include "meshsens/errors.hpp"

namespace meshsens {

namespace {

// Relative threshold on |det E_K| / h_K^d below which an element counts as degenerate.
constexpr double kDegenerateTol = 1e-12;

double factorial(int n)
{
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

std::vector<bool> topological_boundary(int dim, std::size_t nv, const std::vector<std::size_t>& conn)
{
    const std::size_t stride = static_cast<std::size_t>(dim) + 1;
    std::map<std::array<std::size_t, 3>, int> facet_count;
    for (std::size_t base = 0; base < conn.size(); base += stride) {
        for (std::size_t skip = 0; skip < stride; ++skip) {
            std::array<std::size_t, 3> key{0, 0, 0};
            std::size_t n = 0;
            for (std::size_t j = 0; j < stride; ++j)
                if (j != skip) key[n++] = conn[base + j];
            std::sort(key.begin(), key.begin() + static_cast<std::ptrdiff_t>(n));
            ++facet_count[key];
        }
    }
    std::vector<bool> flags(nv, false);
    for (const auto& [key, count] : facet_count) {
        if (count != 1) continue;
        for (int j = 0; j < dim; ++j) flags[key[static_cast<std::size_t>(j)]] = true;
    }
    return flags;
}

std::string strip_comment(const std::string& line)
{
    const auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

bool next_content_line(std::istream& in, std::string& line, std::size_t& line_no)
{
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        line = strip_comment(raw);
        if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
}

std::string format_double(double v)
{
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), res.ptr};
}

}  // namespace

SimplicialMesh SimplicialMesh::create(int dim,
                                      std::vector<Vec> vertices,
                                      std::vector<std::vector<std::size_t>> elements,
                                      std::vector<bool> boundary,
                                      MeshBuildOptions options)
{
    if (dim < 1 || dim > kMaxDim) throw MeshError("mesh dimension must be 1, 2 or 3, got " + std::to_string(dim));
    for (std::size_t i = 0; i < vertices.size(); ++i)
        if (vertices[i].size() != dim)
            throw MeshError("vertex " + std::to_string(i) + " has wrong coordinate count");

    SimplicialMesh mesh;
    mesh.dim_ = dim;
    const std::size_t stride = static_cast<std::size_t>(dim) + 1;
    mesh.connectivity_.reserve(elements.size() * stride);

    for (std::size_t k = 0; k < elements.size(); ++k) {
        auto& el = elements[k];
        if (el.size() != stride)
            throw MeshError("element " + std::to_string(k) + " must have " + std::to_string(stride) + " vertices");
        for (std::size_t j = 0; j < stride; ++j) {
            if (el[j] >= vertices.size())
                throw MeshError("element " + std::to_string(k) + " references vertex " + std::to_string(el[j]) +
                                " but the mesh has " + std::to_string(vertices.size()) + " vertices");
            for (std::size_t i = 0; i < j; ++i)
                if (el[i] == el[j]) throw DegenerateElementError(k, "element " + std::to_string(k) + " repeats a vertex");
        }
        std::array<Vec, 4> pts;
        for (std::size_t j = 0; j < stride; ++j) pts[j] = vertices[el[j]];
        try {
            (void)ElementGeometry::from_vertices(std::span<const Vec>(pts.data(), stride), k);
        } catch (const InvertedElementError&) {
            if (options.orientation == Orientation::Require) throw;
            // Swapping two vertices flips the sign of det(E_K).
            std::swap(el[stride - 2], el[stride - 1]);
        }
        mesh.connectivity_.insert(mesh.connectivity_.end(), el.begin(), el.end());
    }
    mesh.vertices_ = std::move(vertices);

    const auto topo = topological_boundary(dim, mesh.vertices_.size(), mesh.connectivity_);
    if (boundary.empty()) {
        mesh.boundary_ = topo;
    } else {
        if (boundary.size() != mesh.vertices_.size())
            throw MeshError("boundary flag count does not match vertex count");
        if (options.check_boundary_flags) {
            for (std::size_t i = 0; i < topo.size(); ++i)
                if (topo[i] && !boundary[i])
                    throw MeshError("vertex " + std::to_string(i) + " lies on the mesh boundary but is not flagged");
        }
        mesh.boundary_ = std::move(boundary);
    }
    return mesh;
}

std::size_t SimplicialMesh::num_interior_vertices() const noexcept
{
    return static_cast<std::size_t>(std::count(boundary_.begin(), boundary_.end(), false));
}

SimplicialMesh SimplicialMesh::with_vertices(std::vector<Vec> vertices) const
{
    if (vertices.size() != vertices_.size()) throw MeshError("vertex count changed");
    SimplicialMesh out = *this;
    out.vertices_ = std::move(vertices);
    for (std::size_t k = 0; k < out.num_elements(); ++k) (void)element_geometry(out, k);
    return out;
}

bool SimplicialMesh::same_connectivity(const SimplicialMesh& other) const noexcept
{
    return dim_ == other.dim_ && vertices_.size() == other.vertices_.size() &&
           connectivity_ == other.connectivity_;
}

bool operator==(const SimplicialMesh& a, const SimplicialMesh& b)
{
    return a.same_connectivity(b) && a.boundary_ == b.boundary_ && a.vertices_ == b.vertices_;
}

ElementGeometry ElementGeometry::from_vertices(std::span<const Vec> vertices, std::size_t element_index)
{
    const int d = static_cast<int>(vertices.size()) - 1;
    ElementGeometry g;
    g.edge_matrix.resize(d, d);
    for (int i = 0; i < d; ++i) g.edge_matrix.col(i) = vertices[static_cast<std::size_t>(i) + 1] - vertices[0];

    double diameter = 0.0;
    for (std::size_t i = 0; i < vertices.size(); ++i)
        for (std::size_t j = i + 1; j < vertices.size(); ++j)
            diameter = std::max(diameter, (vertices[i] - vertices[j]).norm());
    g.diameter = diameter;

    g.det = g.edge_matrix.determinant();
    if (!(std::abs(g.det) > kDegenerateTol * std::pow(diameter, d)))
        throw DegenerateElementError(element_index, "element " + std::to_string(element_index) + " is degenerate");
    if (g.det < 0.0)
        throw InvertedElementError(element_index, "element " + std::to_string(element_index) + " is inverted");

    g.volume = g.det / factorial(d);
    g.inv_transpose = g.edge_matrix.inverse().transpose();
    g.grad_phi0 = -g.inv_transpose.rowwise().sum();

    double max_grad = g.grad_phi0.norm();
    for (int i = 0; i < d; ++i) max_grad = std::max(max_grad, g.inv_transpose.col(i).norm());
    g.min_height = 1.0 / max_grad;
    return g;
}

ElementGeometry element_geometry(const SimplicialMesh& mesh, std::size_t k)
{
    if (k >= mesh.num_elements()) throw MeshError("element index " + std::to_string(k) + " out of range");
    const auto el = mesh.element(k);
    std::array<Vec, 4> pts;
    for (std::size_t j = 0; j < el.size(); ++j) pts[j] = mesh.vertex(el[j]);
    return ElementGeometry::from_vertices(std::span<const Vec>(pts.data(), el.size()), k);
}

Mat edge_matrix(const SimplicialMesh& mesh, std::size_t k)
{
    const auto el = mesh.element(k);
    const int d = mesh.dim();
    Mat e(d, d);
    for (int i = 0; i < d; ++i) e.col(i) = mesh.vertex(el[static_cast<std::size_t>(i) + 1]) - mesh.vertex(el[0]);
    return e;
}

MeshQuality mesh_quality(const SimplicialMesh& mesh)
{
    MeshQuality q;
    q.min_height = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        const auto g = element_geometry(mesh, k);
        q.max_aspect = std::max(q.max_aspect, g.diameter / g.min_height);
        q.min_height = std::min(q.min_height, g.min_height);
        q.max_diameter = std::max(q.max_diameter, g.diameter);
        q.total_volume += g.volume;
    }
    return q;
}

SimplicialMesh build_structured_mesh(int n)
{
    if (n < 1) throw MeshError("structured mesh needs N >= 1, got " + std::to_string(n));
    const auto np = static_cast<std::size_t>(n) + 1;
    const auto nc = static_cast<std::size_t>(n);
    const double h = 1.0 / n;

    std::vector<Vec> vertices;
    std::vector<bool> boundary;
    vertices.reserve(np * np + nc * nc);
    for (std::size_t j = 0; j < np; ++j) {
        for (std::size_t i = 0; i < np; ++i) {
            vertices.emplace_back(Vec{{static_cast<double>(i) * h, static_cast<double>(j) * h}});
            boundary.push_back(i == 0 || j == 0 || i == nc || j == nc);
        }
    }
    for (std::size_t j = 0; j < nc; ++j) {
        for (std::size_t i = 0; i < nc; ++i) {
            vertices.emplace_back(Vec{{(static_cast<double>(i) + 0.5) * h, (static_cast<double>(j) + 0.5) * h}});
            boundary.push_back(false);
        }
    }

    auto corner = [np](std::size_t i, std::size_t j) { return j * np + i; };
    std::vector<std::vector<std::size_t>> elements;
    elements.reserve(4 * nc * nc);
    for (std::size_t j = 0; j < nc; ++j) {
        for (std::size_t i = 0; i < nc; ++i) {
            const std::size_t a = corner(i, j), b = corner(i + 1, j), c = corner(i + 1, j + 1), d = corner(i, j + 1);
            const std::size_t m = np * np + j * nc + i;
            elements.push_back({a, b, m});
            elements.push_back({b, c, m});
            elements.push_back({c, d, m});
            elements.push_back({d, a, m});
        }
    }
    return SimplicialMesh::create(2, std::move(vertices), std::move(elements), std::move(boundary),
                                  {.orientation = Orientation::Require});
}

void write_mesh(const SimplicialMesh& mesh, std::ostream& out)
{
    out << "meshsens v1 " << mesh.dim() << ' ' << mesh.num_vertices() << ' ' << mesh.num_elements() << '\n';
    for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
        const auto& v = mesh.vertex(i);
        for (int c = 0; c < mesh.dim(); ++c) out << format_double(v(c)) << ' ';
        out << (mesh.is_boundary(i) ? 1 : 0) << '\n';
    }
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        const auto el = mesh.element(k);
        for (std::size_t j = 0; j < el.size(); ++j) out << (j ? " " : "") << el[j];
        out << '\n';
    }
}

void write_mesh(const SimplicialMesh& mesh, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw MeshFormatError("cannot open " + path.string() + " for writing");
    write_mesh(mesh, out);
    if (!out) throw MeshFormatError("failed writing " + path.string());
}

SimplicialMesh read_mesh(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    if (!next_content_line(in, line, line_no)) throw MeshFormatError("empty mesh file");

    std::istringstream header(line);
    std::string magic, version;
    int dim = 0;
    long long nv = -1, ne = -1;
    header >> magic >> version >> dim >> nv >> ne;
    if (!header || magic != "meshsens" || version != "v1" || nv < 0 || ne < 0)
        throw MeshFormatError("malformed header on line " + std::to_string(line_no) +
                              ", expected 'meshsens v1 <d> <nv> <ne>'");
    if (dim < 1 || dim > kMaxDim) throw MeshFormatError("unsupported dimension " + std::to_string(dim));

    std::vector<Vec> vertices(static_cast<std::size_t>(nv));
    std::vector<bool> boundary(static_cast<std::size_t>(nv));
    for (auto i = 0LL; i < nv; ++i) {
        if (!next_content_line(in, line, line_no)) throw MeshFormatError("unexpected end of file in vertex block");
        std::istringstream row(line);
        Vec x(dim);
        for (int c = 0; c < dim; ++c) {
            std::string tok;
            row >> tok;
            double value = 0.0;
            const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
            if (tok.empty() || res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
                throw MeshFormatError("bad coordinate on line " + std::to_string(line_no));
            x(c) = value;
        }
        int flag = -1;
        row >> flag;
        if (!row || (flag != 0 && flag != 1))
            throw MeshFormatError("bad boundary flag on line " + std::to_string(line_no));
        vertices[static_cast<std::size_t>(i)] = x;
        boundary[static_cast<std::size_t>(i)] = flag == 1;
    }

    std::vector<std::vector<std::size_t>> elements(static_cast<std::size_t>(ne));
    for (auto k = 0LL; k < ne; ++k) {
        if (!next_content_line(in, line, line_no)) throw MeshFormatError("unexpected end of file in element block");
        std::istringstream row(line);
        auto& el = elements[static_cast<std::size_t>(k)];
        for (int j = 0; j <= dim; ++j) {
            long long idx = -1;
            row >> idx;
            if (!row || idx < 0) throw MeshFormatError("bad vertex index on line " + std::to_string(line_no));
            if (idx >= nv)
                throw MeshFormatError("element " + std::to_string(k) + " references vertex " + std::to_string(idx) +
                                      " of a " + std::to_string(nv) + "-vertex mesh (line " +
                                      std::to_string(line_no) + ")");
            el.push_back(static_cast<std::size_t>(idx));
        }
    }
    if (next_content_line(in, line, line_no)) throw MeshFormatError("trailing data on line " + std::to_string(line_no));

    return SimplicialMesh::create(dim, std::move(vertices), std::move(elements), std::move(boundary),
                                  {.orientation = Orientation::Require});
}

SimplicialMesh read_mesh(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw MeshFormatError("cannot open " + path.string());
    return read_mesh(in);
}

}  // namespace meshsens
