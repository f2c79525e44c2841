/**
 * @file spaces.hpp
 * @brief Degree-of-freedom maps: clamped quadratic vector displacement, linear scalar pressure.
 */
#pragma once

#include "biot/mesh.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace biot {

using Vector = Eigen::VectorXd;

enum class PressureConstraint { DirichletNodes, ZeroMean };
enum class SpaceKind { Displacement, Pressure };

/**
 * Quadratic nodes are the mesh vertices followed by the edge midpoints. A
 * displacement dof is (component, node) stored as component * num_nodes + node.
 * Pressure dofs are the mesh vertices.
 */
struct Spaces {
    // Quadratic node bookkeeping.
    std::vector<Point> quad_nodes;                     // vertices then midpoints
    std::vector<std::array<int, 6>> element_quad_nodes;  // v0 v1 v2 m01 m12 m20
    std::vector<bool> quad_node_on_boundary;

    // Displacement dofs.
    int num_displacement_dofs = 0;
    std::vector<int> displacement_free_index;  // full dof -> free index or -1
    std::vector<int> displacement_free_dofs;   // free index -> full dof

    // Pressure dofs.
    int num_pressure_dofs = 0;
    PressureConstraint pressure_constraint = PressureConstraint::ZeroMean;
    std::vector<bool> pressure_dirichlet;    // per vertex
    std::vector<int> pressure_free_index;    // vertex -> free index or -1
    std::vector<int> pressure_free_dofs;     // free index -> vertex

    [[nodiscard]] int num_quad_nodes() const { return static_cast<int>(quad_nodes.size()); }
    [[nodiscard]] int num_free_displacement() const { return static_cast<int>(displacement_free_dofs.size()); }
    [[nodiscard]] int num_free_pressure() const { return static_cast<int>(pressure_free_dofs.size()); }
    [[nodiscard]] bool zero_mean() const { return pressure_constraint == PressureConstraint::ZeroMean; }
};

/// Coefficient vector tied to one of the two dof maps.
struct Field {
    SpaceKind kind = SpaceKind::Pressure;
    Vector coefficients;

    static Field pressure(Vector c) { return {SpaceKind::Pressure, std::move(c)}; }
    static Field displacement(Vector c) { return {SpaceKind::Displacement, std::move(c)}; }
};

inline Spaces build_spaces(const TriMesh& mesh) {
    Spaces s;
    const int nv = static_cast<int>(mesh.num_vertices());
    s.quad_nodes = mesh.vertices;
    std::map<std::pair<int, int>, int> edge_node;
    s.element_quad_nodes.reserve(mesh.num_triangles());
    for (const auto& tri : mesh.triangles) {
        std::array<int, 6> nodes{tri[0], tri[1], tri[2], -1, -1, -1};
        for (int k = 0; k < 3; ++k) {
            const int a = tri[k], b = tri[(k + 1) % 3];
            const auto key = std::minmax(a, b);
            auto [it, inserted] = edge_node.try_emplace({key.first, key.second}, static_cast<int>(s.quad_nodes.size()));
            if (inserted) {
                const Point& pa = mesh.vertices[a];
                const Point& pb = mesh.vertices[b];
                s.quad_nodes.push_back({0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)});
            }
            nodes[3 + k] = it->second;
        }
        s.element_quad_nodes.push_back(nodes);
    }

    const int nq = s.num_quad_nodes();
    s.quad_node_on_boundary.assign(nq, false);
    s.pressure_dirichlet.assign(nv, false);
    bool any_dirichlet = false;
    for (const auto& e : mesh.boundary_edges) {
        const auto key = std::minmax(e.v[0], e.v[1]);
        s.quad_node_on_boundary[e.v[0]] = true;
        s.quad_node_on_boundary[e.v[1]] = true;
        s.quad_node_on_boundary[edge_node.at({key.first, key.second})] = true;
        if (e.tag == BoundaryTag::PressureDirichlet) {
            // Junction vertices shared with Neumann edges end up Dirichlet.
            s.pressure_dirichlet[e.v[0]] = true;
            s.pressure_dirichlet[e.v[1]] = true;
            any_dirichlet = true;
        }
    }

    s.num_displacement_dofs = 2 * nq;
    s.displacement_free_index.assign(s.num_displacement_dofs, -1);
    for (int c = 0; c < 2; ++c) {
        for (int a = 0; a < nq; ++a) {
            if (s.quad_node_on_boundary[a]) continue;
            const int dof = c * nq + a;
            s.displacement_free_index[dof] = static_cast<int>(s.displacement_free_dofs.size());
            s.displacement_free_dofs.push_back(dof);
        }
    }

    s.num_pressure_dofs = nv;
    s.pressure_constraint = any_dirichlet ? PressureConstraint::DirichletNodes : PressureConstraint::ZeroMean;
    s.pressure_free_index.assign(nv, -1);
    for (int v = 0; v < nv; ++v) {
        if (s.pressure_dirichlet[v]) continue;
        s.pressure_free_index[v] = static_cast<int>(s.pressure_free_dofs.size());
        s.pressure_free_dofs.push_back(v);
    }
    return s;
}

// --- restriction / extension between full and free numbering -------------

inline Vector restrict_displacement(const Spaces& s, const Vector& full) {
    Vector free(s.num_free_displacement());
    for (int i = 0; i < free.size(); ++i) free[i] = full[s.displacement_free_dofs[i]];
    return free;
}

inline Vector extend_displacement(const Spaces& s, const Vector& free) {
    Vector full = Vector::Zero(s.num_displacement_dofs);
    for (int i = 0; i < free.size(); ++i) full[s.displacement_free_dofs[i]] = free[i];
    return full;
}

inline Vector restrict_pressure(const Spaces& s, const Vector& full) {
    Vector free(s.num_free_pressure());
    for (int i = 0; i < free.size(); ++i) free[i] = full[s.pressure_free_dofs[i]];
    return free;
}

inline Vector extend_pressure(const Spaces& s, const Vector& free) {
    Vector full = Vector::Zero(s.num_pressure_dofs);
    for (int i = 0; i < free.size(); ++i) full[s.pressure_free_dofs[i]] = free[i];
    return full;
}

// --- mean value and the projection onto zero-mean functions --------------

/// Exact integral of a P1 field: sum over triangles of area * (average of vertex values).
inline double integrate_pressure(const Vector& f, const TriMesh& mesh) {
    double total = 0.0;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        total += signed_area(mesh, t) * (f[tri[0]] + f[tri[1]] + f[tri[2]]) / 3.0;
    }
    return total;
}

inline double mean_value(const Field& f, const TriMesh& mesh) {
    if (f.kind != SpaceKind::Pressure) throw std::invalid_argument("mean_value: expected a pressure field");
    return integrate_pressure(f.coefficients, mesh) / mesh_stats(mesh).total_area;
}

inline Field zero_mean_project(const Field& f, const TriMesh& mesh) {
    const double m = mean_value(f, mesh);
    return Field::pressure((f.coefficients.array() - m).matrix());
}

// --- interpolation ---------------------------------------------------------

using ScalarFunction = std::function<double(double, double)>;
using VectorFunction = std::function<std::array<double, 2>(double, double)>;

inline Field interpolate(const ScalarFunction& g, const Spaces& s) {
    Vector c(s.num_pressure_dofs);
    for (int v = 0; v < s.num_pressure_dofs; ++v) {
        const Point& p = s.quad_nodes[v];
        c[v] = g(p.x, p.y);
        if (!std::isfinite(c[v])) throw std::invalid_argument("interpolate: non-finite sample value");
    }
    return Field::pressure(std::move(c));
}

/// Quadratic nodal interpolant; clamped (boundary) entries are forced to zero.
inline Field interpolate(const VectorFunction& g, const Spaces& s) {
    const int nq = s.num_quad_nodes();
    Vector c = Vector::Zero(s.num_displacement_dofs);
    for (int a = 0; a < nq; ++a) {
        const Point& p = s.quad_nodes[a];
        const auto val = g(p.x, p.y);
        if (!std::isfinite(val[0]) || !std::isfinite(val[1])) {
            throw std::invalid_argument("interpolate: non-finite sample value");
        }
        if (s.quad_node_on_boundary[a]) continue;
        c[a] = val[0];
        c[nq + a] = val[1];
    }
    return Field::displacement(std::move(c));
}

}  // namespace biot
