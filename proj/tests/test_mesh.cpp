#include <gtest/gtest.h>

#include "biot/mesh.hpp"

#include <set>

using namespace biot;

namespace {

bool on_boundary(const Point& p) {
    return p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0;
}

}  // namespace

TEST(Mesh, CountsAndArea) {
    for (int n : {1, 2, 3, 8}) {
        const TriMesh m = build_unit_square_mesh(n, BcLayout::AllDirichlet);
        EXPECT_EQ(m.num_vertices(), static_cast<std::size_t>((n + 1) * (n + 1)));
        EXPECT_EQ(m.num_triangles(), static_cast<std::size_t>(2 * n * n));
        EXPECT_EQ(m.boundary_edges.size(), static_cast<std::size_t>(4 * n));
        EXPECT_NEAR(mesh_stats(m).total_area, 1.0, 1e-14);
        EXPECT_NEAR(mesh_stats(m).h_max, std::sqrt(2.0) / n, 1e-14);
        EXPECT_NO_THROW(validate(m));
    }
}

TEST(Mesh, TrianglesAreCounterClockwise) {
    const TriMesh m = build_unit_square_mesh(5, BcLayout::AllNeumann);
    for (std::size_t t = 0; t < m.num_triangles(); ++t) EXPECT_NEAR(signed_area(m, t), 1.0 / 50.0, 1e-15);
}

TEST(Mesh, NoTriangleHasAllVerticesOnTheBoundary) {
    for (int n : {2, 3, 4, 7}) {
        const TriMesh m = build_unit_square_mesh(n, BcLayout::AllDirichlet);
        for (const auto& tri : m.triangles) {
            const int count = on_boundary(m.vertices[tri[0]]) + on_boundary(m.vertices[tri[1]]) +
                              on_boundary(m.vertices[tri[2]]);
            EXPECT_LT(count, 3);
        }
    }
}

TEST(Mesh, OutwardNormalsPointAway) {
    const TriMesh m = build_unit_square_mesh(4, BcLayout::AllDirichlet);
    for (const auto& e : m.boundary_edges) {
        const Point nrm = outward_normal(m, e);
        const Point& a = m.vertices[e.v[0]];
        const Point& b = m.vertices[e.v[1]];
        const Point mid{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
        // stepping outward leaves the unit square
        const Point out{mid.x + 0.1 * nrm.x, mid.y + 0.1 * nrm.y};
        EXPECT_TRUE(out.x < 0.0 || out.x > 1.0 || out.y < 0.0 || out.y > 1.0);
        EXPECT_NEAR(std::hypot(nrm.x, nrm.y), 1.0, 1e-15);
    }
}

TEST(Mesh, LayoutTags) {
    const TriMesh d = build_unit_square_mesh(4, BcLayout::AllDirichlet);
    for (const auto& e : d.boundary_edges) EXPECT_EQ(e.tag, BoundaryTag::PressureDirichlet);
    const TriMesh nm = build_unit_square_mesh(4, BcLayout::AllNeumann);
    for (const auto& e : nm.boundary_edges) EXPECT_EQ(e.tag, BoundaryTag::PressureNeumann);
    const TriMesh mx = build_unit_square_mesh(4, BcLayout::MixedLeftDirichlet);
    int dirichlet = 0;
    for (const auto& e : mx.boundary_edges) {
        const bool left = mx.vertices[e.v[0]].x == 0.0 && mx.vertices[e.v[1]].x == 0.0;
        EXPECT_EQ(e.tag == BoundaryTag::PressureDirichlet, left);
        dirichlet += left;
    }
    EXPECT_EQ(dirichlet, 4);
}

TEST(Mesh, RejectsBadInput) {
    EXPECT_THROW(build_unit_square_mesh(0, BcLayout::AllDirichlet), std::invalid_argument);
    EXPECT_THROW(build_unit_square_mesh(-3, BcLayout::AllNeumann), std::invalid_argument);
    EXPECT_THROW(parse_layout("robin"), std::invalid_argument);
    for (auto l : {BcLayout::AllDirichlet, BcLayout::AllNeumann, BcLayout::MixedLeftDirichlet}) {
        EXPECT_EQ(parse_layout(to_string(l)), l);
    }
}

TEST(Mesh, ValidateCatchesCorruption) {
    TriMesh m = build_unit_square_mesh(3, BcLayout::AllDirichlet);
    std::swap(m.triangles[0][1], m.triangles[0][2]);
    EXPECT_THROW(validate(m), std::logic_error);

    TriMesh missing = build_unit_square_mesh(3, BcLayout::AllDirichlet);
    missing.boundary_edges.pop_back();
    EXPECT_THROW(validate(missing), std::logic_error);

    TriMesh wrong_tag = build_unit_square_mesh(3, BcLayout::AllNeumann);
    wrong_tag.boundary_edges[0].tag = BoundaryTag::PressureDirichlet;
    EXPECT_THROW(validate(wrong_tag), std::logic_error);
}
