/**
 * @file mesh.hpp
 * @brief Structured triangulations of the unit square with pressure boundary tags.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace biot {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

enum class BoundaryTag { PressureDirichlet, PressureNeumann };

/// Pressure boundary layouts. Displacement is always clamped on the whole boundary.
enum class BcLayout { AllDirichlet, AllNeumann, MixedLeftDirichlet };

inline std::string_view to_string(BcLayout layout) {
    switch (layout) {
    case BcLayout::AllDirichlet: return "dirichlet";
    case BcLayout::AllNeumann: return "neumann";
    case BcLayout::MixedLeftDirichlet: return "mixed_left";
    }
    return "unknown";
}

inline BcLayout parse_layout(std::string_view name) {
    if (name == "dirichlet") return BcLayout::AllDirichlet;
    if (name == "neumann") return BcLayout::AllNeumann;
    if (name == "mixed_left") return BcLayout::MixedLeftDirichlet;
    throw std::invalid_argument("unknown boundary layout '" + std::string(name) + "'");
}

struct BoundaryEdge {
    std::array<int, 2> v{};
    BoundaryTag tag = BoundaryTag::PressureNeumann;
};

struct TriMesh {
    int subdivisions = 0;
    BcLayout layout = BcLayout::AllDirichlet;
    std::vector<Point> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<BoundaryEdge> boundary_edges;

    [[nodiscard]] std::size_t num_vertices() const { return vertices.size(); }
    [[nodiscard]] std::size_t num_triangles() const { return triangles.size(); }
};

inline double signed_area(const Point& a, const Point& b, const Point& c) {
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

inline double signed_area(const TriMesh& mesh, std::size_t t) {
    const auto& tri = mesh.triangles[t];
    return signed_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
}

/**
 * Uniform triangulation with (n+1)^2 vertices and 2n^2 triangles.
 *
 * Each square cell is split by a single diagonal. The diagonal direction is
 * mirrored across the mid-lines so that every corner cell is cut through the
 * domain corner; for n >= 2 no triangle then has all three vertices on the
 * boundary (a requirement for the quadratic/linear pair to be inf-sup stable).
 */
inline TriMesh build_unit_square_mesh(int n, BcLayout layout) {
    if (n < 1) {
        throw std::invalid_argument("build_unit_square_mesh: subdivisions must be >= 1, got " +
                                    std::to_string(n));
    }
    TriMesh mesh;
    mesh.subdivisions = n;
    mesh.layout = layout;
    const int np1 = n + 1;
    const double h = 1.0 / static_cast<double>(n);
    mesh.vertices.reserve(static_cast<std::size_t>(np1) * np1);
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            // Exact end points so boundary detection never depends on rounding.
            const double x = (i == n) ? 1.0 : i * h;
            const double y = (j == n) ? 1.0 : j * h;
            mesh.vertices.push_back({x, y});
        }
    }
    const auto vid = [np1](int i, int j) { return j * np1 + i; };

    mesh.triangles.reserve(2 * static_cast<std::size_t>(n) * n);
    const double mid = 0.5 * n;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int v00 = vid(i, j), v10 = vid(i + 1, j);
            const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
            const bool main_diagonal = ((i + 0.5) < mid) == ((j + 0.5) < mid);
            if (main_diagonal) {
                mesh.triangles.push_back({v00, v10, v11});
                mesh.triangles.push_back({v00, v11, v01});
            } else {
                mesh.triangles.push_back({v00, v10, v01});
                mesh.triangles.push_back({v10, v11, v01});
            }
        }
    }

    // Boundary edges, counter-clockwise: bottom, right, top, left.
    const auto tag_for = [layout](bool on_left) {
        switch (layout) {
        case BcLayout::AllDirichlet: return BoundaryTag::PressureDirichlet;
        case BcLayout::AllNeumann: return BoundaryTag::PressureNeumann;
        case BcLayout::MixedLeftDirichlet:
            return on_left ? BoundaryTag::PressureDirichlet : BoundaryTag::PressureNeumann;
        }
        return BoundaryTag::PressureNeumann;
    };
    mesh.boundary_edges.reserve(4 * static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) mesh.boundary_edges.push_back({{vid(i, 0), vid(i + 1, 0)}, tag_for(false)});
    for (int j = 0; j < n; ++j) mesh.boundary_edges.push_back({{vid(n, j), vid(n, j + 1)}, tag_for(false)});
    for (int i = n; i > 0; --i) mesh.boundary_edges.push_back({{vid(i, n), vid(i - 1, n)}, tag_for(false)});
    for (int j = n; j > 0; --j) mesh.boundary_edges.push_back({{vid(0, j), vid(0, j - 1)}, tag_for(true)});
    return mesh;
}

struct MeshStats {
    double h_max = 0.0;
    double total_area = 0.0;
};

inline MeshStats mesh_stats(const TriMesh& mesh) {
    MeshStats stats;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int k = 0; k < 3; ++k) {
            const Point& a = mesh.vertices[tri[k]];
            const Point& b = mesh.vertices[tri[(k + 1) % 3]];
            stats.h_max = std::max(stats.h_max, std::hypot(b.x - a.x, b.y - a.y));
        }
        stats.total_area += signed_area(mesh, t);
    }
    return stats;
}

/// Outward unit normal of an oriented boundary edge (interior on the left).
inline Point outward_normal(const TriMesh& mesh, const BoundaryEdge& edge) {
    const Point& a = mesh.vertices[edge.v[0]];
    const Point& b = mesh.vertices[edge.v[1]];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    return {(b.y - a.y) / len, -(b.x - a.x) / len};
}

/// Checks every structural invariant; throws std::logic_error naming the first violation.
inline void validate(const TriMesh& mesh) {
    const auto nv = static_cast<int>(mesh.vertices.size());
    const auto in_range = [nv](int v) { return v >= 0 && v < nv; };
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        for (int v : mesh.triangles[t]) {
            if (!in_range(v)) throw std::logic_error("triangle " + std::to_string(t) + " references bad vertex");
        }
        if (!(signed_area(mesh, t) > 0.0)) {
            throw std::logic_error("triangle " + std::to_string(t) + " is not counter-clockwise");
        }
    }
    // Edge -> incident triangle count.
    std::vector<std::array<int, 3>> edges;  // (lo, hi, count)
    edges.reserve(3 * mesh.triangles.size());
    for (const auto& tri : mesh.triangles) {
        for (int k = 0; k < 3; ++k) {
            const int a = tri[k], b = tri[(k + 1) % 3];
            edges.push_back({std::min(a, b), std::max(a, b), 1});
        }
    }
    std::sort(edges.begin(), edges.end());
    std::vector<std::array<int, 2>> boundary;
    for (std::size_t i = 0; i < edges.size();) {
        std::size_t j = i;
        while (j < edges.size() && edges[j][0] == edges[i][0] && edges[j][1] == edges[i][1]) ++j;
        if (j - i == 1) boundary.push_back({edges[i][0], edges[i][1]});
        if (j - i > 2) throw std::logic_error("non-manifold edge");
        i = j;
    }
    std::vector<std::array<int, 2>> tagged;
    for (const auto& e : mesh.boundary_edges) {
        if (!in_range(e.v[0]) || !in_range(e.v[1])) throw std::logic_error("boundary edge references bad vertex");
        tagged.push_back({std::min(e.v[0], e.v[1]), std::max(e.v[0], e.v[1])});
    }
    std::sort(tagged.begin(), tagged.end());
    if (std::adjacent_find(tagged.begin(), tagged.end()) != tagged.end()) {
        throw std::logic_error("boundary edge listed twice");
    }
    if (tagged != boundary) throw std::logic_error("tagged edges do not cover the boundary exactly");
    if (mesh.layout == BcLayout::AllNeumann) {
        for (const auto& e : mesh.boundary_edges) {
            if (e.tag != BoundaryTag::PressureNeumann) throw std::logic_error("Dirichlet edge in AllNeumann layout");
        }
    }
    if (std::abs(mesh_stats(mesh).total_area - 1.0) > 1e-12) throw std::logic_error("areas do not sum to 1");
}

}  // namespace biot
