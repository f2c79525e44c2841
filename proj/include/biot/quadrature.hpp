#pragma once

#include "biot/mesh.hpp"

#include <array>
#include <cmath>

namespace biot {

/// Six-point symmetric rule on the reference triangle {(0,0),(1,0),(0,1)}, exact to degree 4.
struct QuadratureRule {
    static constexpr int num_points = 6;
    static constexpr int degree = 4;
    std::array<std::array<double, 2>, num_points> points{};
    std::array<double, num_points> weights{};  // sum to 1/2
};

inline const QuadratureRule& triangle_rule() {
    static const QuadratureRule rule = [] {
        QuadratureRule r;
        constexpr double a = 0.445948490915965;
        constexpr double wa = 0.223381589678011 / 2.0;
        constexpr double b = 0.091576213509771;
        constexpr double wb = 0.109951743655322 / 2.0;
        r.points = {{{a, a}, {1.0 - 2.0 * a, a}, {a, 1.0 - 2.0 * a},
                     {b, b}, {1.0 - 2.0 * b, b}, {b, 1.0 - 2.0 * b}}};
        r.weights = {wa, wa, wa, wb, wb, wb};
        return r;
    }();
    return rule;
}

/// Affine element map with constant barycentric gradients.
struct ElementGeometry {
    std::array<Point, 3> vertex{};
    double area = 0.0;
    std::array<Point, 3> grad_lambda{};

    ElementGeometry(const TriMesh& mesh, std::size_t t) {
        const auto& tri = mesh.triangles[t];
        for (int k = 0; k < 3; ++k) vertex[k] = mesh.vertices[tri[k]];
        const double j11 = vertex[1].x - vertex[0].x, j12 = vertex[2].x - vertex[0].x;
        const double j21 = vertex[1].y - vertex[0].y, j22 = vertex[2].y - vertex[0].y;
        const double det = j11 * j22 - j12 * j21;
        area = 0.5 * det;
        // rows of J^{-1} are the gradients of xi and eta
        const Point gxi{j22 / det, -j12 / det};
        const Point geta{-j21 / det, j11 / det};
        grad_lambda[1] = gxi;
        grad_lambda[2] = geta;
        grad_lambda[0] = {-gxi.x - geta.x, -gxi.y - geta.y};
    }

    [[nodiscard]] Point map(double xi, double eta) const {
        return {vertex[0].x + xi * (vertex[1].x - vertex[0].x) + eta * (vertex[2].x - vertex[0].x),
                vertex[0].y + xi * (vertex[1].y - vertex[0].y) + eta * (vertex[2].y - vertex[0].y)};
    }

    /// Physical-domain weight for reference weight w.
    [[nodiscard]] double jacobian_weight(double w) const { return 2.0 * area * w; }
};

inline std::array<double, 3> barycentric(double xi, double eta) { return {1.0 - xi - eta, xi, eta}; }

/// Quadratic shape functions, ordered v0 v1 v2 m01 m12 m20.
inline std::array<double, 6> p2_values(const std::array<double, 3>& l) {
    return {l[0] * (2 * l[0] - 1), l[1] * (2 * l[1] - 1), l[2] * (2 * l[2] - 1),
            4 * l[0] * l[1],       4 * l[1] * l[2],       4 * l[2] * l[0]};
}

inline std::array<Point, 6> p2_gradients(const std::array<double, 3>& l, const std::array<Point, 3>& g) {
    std::array<Point, 6> out{};
    for (int i = 0; i < 3; ++i) out[i] = {(4 * l[i] - 1) * g[i].x, (4 * l[i] - 1) * g[i].y};
    for (int k = 0; k < 3; ++k) {
        const int i = k, j = (k + 1) % 3;
        out[3 + k] = {4 * (l[i] * g[j].x + l[j] * g[i].x), 4 * (l[i] * g[j].y + l[j] * g[i].y)};
    }
    return out;
}

}  // namespace biot
