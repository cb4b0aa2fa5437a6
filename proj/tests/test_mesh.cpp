#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "meshsens/errors.hpp"
#include "meshsens/mesh.hpp"
#include "oracles.hpp"

using namespace meshsens;

namespace {

Vec v2(double x, double y)
{
    Vec v(2);
    v << x, y;
    return v;
}

}  // namespace

TEST(StructuredMesh, SingleCellLayout)
{
    const auto mesh = build_structured_mesh(1);
    EXPECT_EQ(mesh.dim(), 2);
    EXPECT_EQ(mesh.num_vertices(), 5u);
    EXPECT_EQ(mesh.num_elements(), 4u);
    EXPECT_EQ(mesh.vertex(4), v2(0.5, 0.5));
    EXPECT_EQ(mesh.num_interior_vertices(), 1u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_TRUE(mesh.is_boundary(i));
}

TEST(StructuredMesh, CountsForN40)
{
    const auto mesh = build_structured_mesh(40);
    EXPECT_EQ(mesh.num_vertices(), 41u * 41u + 1600u);
    EXPECT_EQ(mesh.num_vertices(), 3281u);
    EXPECT_EQ(mesh.num_elements(), 6400u);
    EXPECT_EQ(mesh.num_interior_vertices(), 39u * 39u + 1600u);
}

TEST(StructuredMesh, ElementsPositiveAndTileTheSquare)
{
    for (int n : {1, 3, 8}) {
        const auto mesh = build_structured_mesh(n);
        double total = 0;
        for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
            const auto g = element_geometry(mesh, k);
            EXPECT_GT(g.det, 0);
            EXPECT_NEAR(g.volume, g.det / 2, 1e-15);
            total += g.volume;
        }
        EXPECT_NEAR(total, 1.0, 1e-13);
        EXPECT_NEAR(mesh_quality(mesh).total_volume, 1.0, 1e-13);
    }
}

TEST(StructuredMesh, N2ElementSizes)
{
    // legs of length 1/(2 sqrt 2) meeting at the right angle at the cell center;
    // the shortest height is the one onto the hypotenuse, 1/4
    const auto mesh = build_structured_mesh(2);
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        const auto g = element_geometry(mesh, k);
        EXPECT_NEAR(g.volume, 1.0 / 16.0, 1e-15);
        EXPECT_NEAR(g.diameter, 0.5, 1e-15);
        const double brute = oracle::brute_force_min_height(oracle::element_vertices(mesh, k));
        EXPECT_NEAR(g.min_height, brute, 1e-14);
        EXPECT_NEAR(g.min_height, 0.25, 1e-14);
    }
}

TEST(StructuredMesh, QualityScaling)
{
    const auto q1 = mesh_quality(build_structured_mesh(1));
    // regression constant for the single-cell mesh
    EXPECT_NEAR(q1.max_aspect, 2.0, 1e-13);
    EXPECT_NEAR(q1.min_height, 0.5, 1e-14);
    double prev = q1.min_height;
    for (int n : {2, 4, 8, 16}) {
        const auto q = mesh_quality(build_structured_mesh(n));
        EXPECT_NEAR(q.min_height, prev / 2, 1e-14);
        EXPECT_NEAR(q.max_aspect, 2.0, 1e-12);
        EXPECT_NEAR(q.max_diameter, 1.0 / n, 1e-14);
        prev = q.min_height;
    }
}

TEST(ElementGeometry, ReferenceTriangle)
{
    const std::vector<Vec> v{v2(0, 0), v2(1, 0), v2(0, 1)};
    const auto g = ElementGeometry::from_vertices(v);
    EXPECT_TRUE(g.edge_matrix.isApprox(Mat::Identity(2, 2)));
    EXPECT_DOUBLE_EQ(g.volume, 0.5);
    EXPECT_DOUBLE_EQ(g.diameter, std::sqrt(2.0));
    EXPECT_NEAR(g.min_height, 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(g.diameter / g.min_height, 2.0, 1e-14);
    EXPECT_EQ(g.grad_phi(0), v2(-1, -1));
    EXPECT_EQ(g.grad_phi(1), v2(1, 0));
    EXPECT_EQ(g.grad_phi(2), v2(0, 1));
}

TEST(ElementGeometry, RandomSimplicesMatchBruteForce)
{
    std::mt19937_64 gen(11);
    for (int d = 1; d <= 3; ++d)
        for (int trial = 0; trial < 50; ++trial) {
            const auto v = oracle::random_simplex(gen, d);
            const auto g = ElementGeometry::from_vertices(v);
            std::vector<Eigen::VectorXd> ev(v.begin(), v.end());
            EXPECT_NEAR(g.min_height, oracle::brute_force_min_height(ev), 1e-10 * g.diameter);
            EXPECT_NEAR(g.volume, std::abs(g.edge_matrix.determinant()) / oracle::factorial(d), 1e-14);
            // partition of unity: gradients sum to zero and grad phi_i . (x_j - x_0) = delta_ij
            Vec sum = Vec::Zero(d);
            for (int i = 0; i <= d; ++i) sum += g.grad_phi(i);
            EXPECT_LT(sum.norm(), 1e-10 / g.min_height);
            for (int i = 1; i <= d; ++i)
                for (int j = 1; j <= d; ++j)
                    EXPECT_NEAR(g.grad_phi(i).dot(v[std::size_t(j)] - v[0]), i == j ? 1.0 : 0.0, 1e-10);
            EXPECT_GE(g.diameter, g.min_height);
        }
}

TEST(ElementGeometry, DegenerateElementsRejected)
{
    const std::vector<Vec> repeated{v2(0, 0), v2(1, 0), v2(1, 0)};
    EXPECT_THROW((void)ElementGeometry::from_vertices(repeated, 3), DegenerateElementError);
    const std::vector<Vec> collinear{v2(0, 0), v2(1, 1), v2(2, 2)};
    try {
        (void)ElementGeometry::from_vertices(collinear, 7);
        FAIL() << "collinear triangle accepted";
    } catch (const DegenerateElementError& e) {
        EXPECT_EQ(e.element(), 7u);
    }
    EXPECT_THROW(SimplicialMesh::create(2, collinear, {{0, 1, 2}}), DegenerateElementError);
}

TEST(SimplicialMesh, OrientationHandling)
{
    const std::vector<Vec> v{v2(0, 0), v2(0, 1), v2(1, 0)};  // clockwise
    const auto m = SimplicialMesh::create(2, v, {{0, 1, 2}});
    EXPECT_GT(element_geometry(m, 0).det, 0);
    try {
        (void)SimplicialMesh::create(2, v, {{0, 1, 2}}, {}, {.orientation = Orientation::Require});
        FAIL() << "clockwise triangle accepted";
    } catch (const InvertedElementError& e) {
        EXPECT_EQ(e.element(), 0u);
    }
}

TEST(SimplicialMesh, BoundaryFlags)
{
    const auto mesh = build_structured_mesh(4);
    for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
        const auto& x = mesh.vertex(i);
        const bool on_edge = x(0) == 0 || x(0) == 1 || x(1) == 0 || x(1) == 1;
        EXPECT_EQ(mesh.is_boundary(i), on_edge) << i;
    }
    // a boundary vertex left unflagged is rejected
    const std::vector<Vec> v{v2(0, 0), v2(1, 0), v2(0, 1)};
    EXPECT_THROW(SimplicialMesh::create(2, v, {{0, 1, 2}}, {true, true, false}), MeshError);
    EXPECT_NO_THROW(SimplicialMesh::create(2, v, {{0, 1, 2}}, {true, true, true}));
}

TEST(SimplicialMesh, RejectsBadConnectivity)
{
    const std::vector<Vec> v{v2(0, 0), v2(1, 0), v2(0, 1)};
    EXPECT_THROW(SimplicialMesh::create(2, v, {{0, 1, 5}}), MeshError);
    EXPECT_THROW(SimplicialMesh::create(2, v, {{0, 1}}), MeshError);
    EXPECT_THROW(SimplicialMesh::create(2, v, {{0, 1, 1}}), MeshError);
    EXPECT_THROW(SimplicialMesh::create(4, v, {{0, 1, 2}}), MeshError);
}

TEST(SimplicialMesh, OtherDimensions)
{
    const auto line = oracle::interval_mesh(5);
    EXPECT_EQ(line.num_interior_vertices(), 4u);
    EXPECT_NEAR(mesh_quality(line).total_volume, 1.0, 1e-14);
    const auto cube = oracle::cube_mesh(3);
    EXPECT_EQ(cube.num_elements(), 6u * 27u);
    EXPECT_EQ(cube.num_interior_vertices(), 8u);
    EXPECT_NEAR(mesh_quality(cube).total_volume, 1.0, 1e-13);
}

TEST(MeshIo, RoundTripIsExact)
{
    auto mesh = build_structured_mesh(3);
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-0.01, 0.01);
    auto verts = mesh.vertices();
    for (std::size_t i = 0; i < verts.size(); ++i)
        if (!mesh.is_boundary(i)) verts[i] += v2(u(gen), u(gen));
    mesh = mesh.with_vertices(verts);
    std::stringstream ss;
    write_mesh(mesh, ss);
    const auto back = read_mesh(ss);
    EXPECT_TRUE(back == mesh);
    for (std::size_t i = 0; i < mesh.num_vertices(); ++i) EXPECT_EQ(back.vertex(i), mesh.vertex(i));
}

TEST(MeshIo, FileRoundTrip3d)
{
    const auto cube = oracle::cube_mesh(2);
    const auto path = std::filesystem::temp_directory_path() / "meshsens_cube_roundtrip.mesh";
    write_mesh(cube, path);
    EXPECT_TRUE(read_mesh(path) == cube);
    std::filesystem::remove(path);
}

TEST(MeshIo, CommentsIgnored)
{
    std::istringstream in("# unit triangle\nmeshsens v1 2 3 1\n0 0 1\n1 0 1 # corner\n0 1 1\n0 1 2\n");
    const auto m = read_mesh(in);
    EXPECT_EQ(m.num_vertices(), 3u);
    EXPECT_EQ(m.num_elements(), 1u);
}

TEST(MeshIo, OutOfRangeIndex)
{
    std::istringstream in("meshsens v1 2 3 1\n0 0 1\n1 0 1\n0 1 1\n0 1 9999\n");
    try {
        (void)read_mesh(in);
        FAIL() << "index 9999 accepted";
    } catch (const MeshFormatError& e) {
        EXPECT_NE(std::string(e.what()).find("9999"), std::string::npos) << e.what();
    }
}

TEST(MeshIo, InvertedElementNamed)
{
    std::istringstream in("meshsens v1 2 4 2\n0 0 1\n1 0 1\n0 1 1\n1 1 1\n0 1 2\n1 2 3\n");
    try {
        (void)read_mesh(in);
        FAIL() << "inverted element accepted";
    } catch (const InvertedElementError& e) {
        EXPECT_EQ(e.element(), 1u);
    }
}

TEST(MeshIo, MalformedInput)
{
    for (const char* text : {"", "mesh v1 2 3 1\n", "meshsens v2 2 3 1\n", "meshsens v1 2 3 1\n0 0 1\n1 0\n",
                             "meshsens v1 2 3 1\n0 0 1\n1 0 1\n0 1 1\n0 1 2\n0 1 2\n",
                             "meshsens v1 2 3 1\n0 0 2\n1 0 1\n0 1 1\n0 1 2\n"}) {
        std::istringstream in(text);
        EXPECT_THROW((void)read_mesh(in), MeshFormatError) << text;
    }
    EXPECT_THROW((void)read_mesh(std::filesystem::path("/nonexistent/file.mesh")), MeshError);
}
