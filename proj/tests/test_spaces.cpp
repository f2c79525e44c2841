#include <gtest/gtest.h>

#include "biot/operators.hpp"

#include <numbers>

using namespace biot;

TEST(Spaces, DofCounts) {
    for (int n : {1, 2, 4, 6}) {
        const TriMesh m = build_unit_square_mesh(n, BcLayout::AllDirichlet);
        const Spaces s = build_spaces(m);
        const int edges = 3 * n * n + 2 * n;
        EXPECT_EQ(s.num_quad_nodes(), (n + 1) * (n + 1) + edges);
        EXPECT_EQ(s.num_displacement_dofs, 2 * s.num_quad_nodes());
        EXPECT_EQ(s.num_free_displacement(), 2 * (2 * n - 1) * (2 * n - 1));
        EXPECT_EQ(s.num_pressure_dofs, (n + 1) * (n + 1));
    }
}

TEST(Spaces, PressureConstraintFollowsLayout) {
    const int n = 4;
    const Spaces d = build_spaces(build_unit_square_mesh(n, BcLayout::AllDirichlet));
    EXPECT_FALSE(d.zero_mean());
    EXPECT_EQ(d.num_free_pressure(), (n - 1) * (n - 1));

    const Spaces nm = build_spaces(build_unit_square_mesh(n, BcLayout::AllNeumann));
    EXPECT_TRUE(nm.zero_mean());
    EXPECT_EQ(nm.num_free_pressure(), (n + 1) * (n + 1));

    // left edge Dirichlet, junction corners included
    const Spaces mx = build_spaces(build_unit_square_mesh(n, BcLayout::MixedLeftDirichlet));
    EXPECT_FALSE(mx.zero_mean());
    EXPECT_EQ(mx.num_free_pressure(), (n + 1) * n);
}

TEST(Spaces, RestrictExtendRoundTrip) {
    const Spaces s = build_spaces(build_unit_square_mesh(3, BcLayout::MixedLeftDirichlet));
    const Vector uf = Vector::LinSpaced(s.num_free_displacement(), -1.0, 2.0);
    EXPECT_EQ(restrict_displacement(s, extend_displacement(s, uf)), uf);
    const Vector pf = Vector::LinSpaced(s.num_free_pressure(), 0.5, 3.0);
    EXPECT_EQ(restrict_pressure(s, extend_pressure(s, pf)), pf);
}

TEST(Spaces, IntegralsAndMeans) {
    const TriMesh m = build_unit_square_mesh(5, BcLayout::AllNeumann);
    const Spaces s = build_spaces(m);
    EXPECT_NEAR(integrate_pressure(Vector::Ones(s.num_pressure_dofs), m), 1.0, 1e-14);
    // linear functions integrate exactly
    const Field f = interpolate([](double x, double y) { return 2.0 * x - y + 0.25; }, s);
    EXPECT_NEAR(mean_value(f, m), 1.0 - 0.5 + 0.25, 1e-14);
    EXPECT_NEAR(mean_value(zero_mean_project(f, m), m), 0.0, 1e-15);
}

TEST(Spaces, DisplacementInterpolantClampsBoundary) {
    const Spaces s = build_spaces(build_unit_square_mesh(4, BcLayout::AllDirichlet));
    const Field u = interpolate([](double x, double y) { return std::array<double, 2>{1.0 + x, y * y}; }, s);
    const int nq = s.num_quad_nodes();
    for (int a = 0; a < nq; ++a) {
        if (!s.quad_node_on_boundary[a]) continue;
        EXPECT_EQ(u.coefficients[a], 0.0);
        EXPECT_EQ(u.coefficients[nq + a], 0.0);
    }
}

TEST(Spaces, InterpolationRejectsNonFinite) {
    const Spaces s = build_spaces(build_unit_square_mesh(2, BcLayout::AllDirichlet));
    EXPECT_THROW(interpolate([](double x, double) { return 1.0 / (x - 0.5); }, s), std::invalid_argument);
}

TEST(Spaces, MidpointsLieOnEdges) {
    const TriMesh m = build_unit_square_mesh(3, BcLayout::AllDirichlet);
    const Spaces s = build_spaces(m);
    for (std::size_t t = 0; t < m.num_triangles(); ++t) {
        const auto& nodes = s.element_quad_nodes[t];
        for (int k = 0; k < 3; ++k) {
            const Point& a = s.quad_nodes[nodes[k]];
            const Point& b = s.quad_nodes[nodes[(k + 1) % 3]];
            const Point& mid = s.quad_nodes[nodes[3 + k]];
            EXPECT_DOUBLE_EQ(mid.x, 0.5 * (a.x + b.x));
            EXPECT_DOUBLE_EQ(mid.y, 0.5 * (a.y + b.y));
        }
    }
}
