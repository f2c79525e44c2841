/**
 * @file assembly.hpp
 * @brief Bilinear forms and load functionals of the Biot weak form.
 *
 * All operators are assembled element by element in mesh order from triplet
 * lists, so repeated assembly is bit-identical. Displacement operators act on
 * the free (unclamped) displacement dofs; pressure operators act on all
 * vertices and constraints are applied by the caller.
 */
#pragma once

#include "biot/errors.hpp"
#include "biot/permeability.hpp"
#include "biot/quadrature.hpp"
#include "biot/spaces.hpp"

#include <Eigen/Sparse>

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace biot {

using SparseOperator = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

using SpaceTimeScalar = std::function<double(double x, double y, double t)>;
using SpaceTimeVector = std::function<std::array<double, 2>(double x, double y, double t)>;

/// Per-element, per-quadrature-point coefficient values.
using QuadratureField = std::vector<std::array<double, QuadratureRule::num_points>>;

namespace detail {

inline SparseOperator from_triplets(int rows, int cols, const Triplets& t) {
    SparseOperator m(rows, cols);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

inline std::array<int, 12> local_displacement_dofs(const Spaces& s, std::size_t t) {
    const int nq = s.num_quad_nodes();
    std::array<int, 12> dofs{};
    for (int c = 0; c < 2; ++c) {
        for (int a = 0; a < 6; ++a) {
            dofs[c * 6 + a] = s.displacement_free_index[c * nq + s.element_quad_nodes[t][a]];
        }
    }
    return dofs;
}

}  // namespace detail

inline SparseOperator assemble_elasticity(const Spaces& s, const TriMesh& mesh, double lambda, double mu) {
    if (!(lambda >= 0.0) || !(mu > 0.0) || !std::isfinite(lambda) || !std::isfinite(mu)) {
        throw ConfigError("Lame parameters must satisfy lambda >= 0, mu > 0");
    }
    const auto& rule = triangle_rule();
    Triplets trip;
    trip.reserve(mesh.num_triangles() * 144);
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const ElementGeometry geo(mesh, t);
        const auto dofs = detail::local_displacement_dofs(s, t);
        std::array<std::array<double, 12>, 12> local{};
        for (int q = 0; q < rule.num_points; ++q) {
            const auto l = barycentric(rule.points[q][0], rule.points[q][1]);
            const auto g = p2_gradients(l, geo.grad_lambda);
            const double w = geo.jacobian_weight(rule.weights[q]);
            for (int c = 0; c < 2; ++c) {
                for (int a = 0; a < 6; ++a) {
                    const double dca = c == 0 ? g[a].x : g[a].y;
                    for (int d = 0; d < 2; ++d) {
                        for (int b = 0; b < 6; ++b) {
                            const double ddb = d == 0 ? g[b].x : g[b].y;
                            const double dda = d == 0 ? g[a].x : g[a].y;
                            const double dcb = c == 0 ? g[b].x : g[b].y;
                            // lambda div:div + 2 mu eps:eps, with 2 eps:eps = delta_cd grad.grad + d_d N_a d_c N_b
                            double val = lambda * dca * ddb + mu * dda * dcb;
                            if (c == d) val += mu * (g[a].x * g[b].x + g[a].y * g[b].y);
                            local[c * 6 + a][d * 6 + b] += w * val;
                        }
                    }
                }
            }
        }
        for (int i = 0; i < 12; ++i) {
            if (dofs[i] < 0) continue;
            for (int j = 0; j < 12; ++j) {
                if (dofs[j] < 0) continue;
                trip.emplace_back(dofs[i], dofs[j], local[i][j]);
            }
        }
    }
    const int n = s.num_free_displacement();
    return detail::from_triplets(n, n, trip);
}

/// G(i, j) = integral of div(phi_j) psi_i; pressure rows (all vertices) by free displacement columns.
inline SparseOperator assemble_divergence_coupling(const Spaces& s, const TriMesh& mesh) {
    const auto& rule = triangle_rule();
    Triplets trip;
    trip.reserve(mesh.num_triangles() * 36);
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const ElementGeometry geo(mesh, t);
        const auto dofs = detail::local_displacement_dofs(s, t);
        const auto& tri = mesh.triangles[t];
        std::array<std::array<double, 12>, 3> local{};
        for (int q = 0; q < rule.num_points; ++q) {
            const auto l = barycentric(rule.points[q][0], rule.points[q][1]);
            const auto g = p2_gradients(l, geo.grad_lambda);
            const double w = geo.jacobian_weight(rule.weights[q]);
            for (int i = 0; i < 3; ++i) {
                for (int a = 0; a < 6; ++a) {
                    local[i][a] += w * l[i] * g[a].x;
                    local[i][6 + a] += w * l[i] * g[a].y;
                }
            }
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 12; ++j) {
                if (dofs[j] < 0) continue;
                trip.emplace_back(tri[i], dofs[j], local[i][j]);
            }
        }
    }
    return detail::from_triplets(s.num_pressure_dofs, s.num_free_displacement(), trip);
}

/// A(i, j) = integral of k grad(psi_i) . grad(psi_j), with k sampled at quadrature points.
inline SparseOperator assemble_diffusion(const Spaces& s, const TriMesh& mesh, const QuadratureField& k,
                                         double k1, double k2) {
    if (k.size() != mesh.num_triangles()) throw std::invalid_argument("assemble_diffusion: k field size mismatch");
    const auto& rule = triangle_rule();
    Triplets trip;
    trip.reserve(mesh.num_triangles() * 9);
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const ElementGeometry geo(mesh, t);
        double kint = 0.0;
        for (int q = 0; q < rule.num_points; ++q) {
            const double kv = k[t][q];
            if (!(kv >= k1 && kv <= k2)) {
                throw ConfigError("assemble_diffusion: permeability value " + std::to_string(kv) +
                                  " outside [k1, k2]");
            }
            kint += geo.jacobian_weight(rule.weights[q]) * kv;
        }
        const auto& tri = mesh.triangles[t];
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                const auto& gi = geo.grad_lambda[i];
                const auto& gj = geo.grad_lambda[j];
                trip.emplace_back(tri[i], tri[j], kint * (gi.x * gj.x + gi.y * gj.y));
            }
        }
    }
    return detail::from_triplets(s.num_pressure_dofs, s.num_pressure_dofs, trip);
}

inline QuadratureField constant_quadrature_field(const TriMesh& mesh, double value) {
    QuadratureField f(mesh.num_triangles());
    for (auto& e : f) e.fill(value);
    return f;
}

/// k(z) at quadrature points, z a linear pressure-space field.
inline QuadratureField permeability_at_quadrature(const PermeabilityModel& model, const Vector& z,
                                                  const TriMesh& mesh) {
    const auto& rule = triangle_rule();
    QuadratureField f(mesh.num_triangles());
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int q = 0; q < rule.num_points; ++q) {
            const auto l = barycentric(rule.points[q][0], rule.points[q][1]);
            const double zq = l[0] * z[tri[0]] + l[1] * z[tri[1]] + l[2] * z[tri[2]];
            f[t][q] = model(zq);
        }
    }
    return f;
}

inline SparseOperator assemble_pressure_mass(const Spaces& s, const TriMesh& mesh) {
    const auto& rule = triangle_rule();
    Triplets trip;
    trip.reserve(mesh.num_triangles() * 9);
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const ElementGeometry geo(mesh, t);
        std::array<std::array<double, 3>, 3> local{};
        for (int q = 0; q < rule.num_points; ++q) {
            const auto l = barycentric(rule.points[q][0], rule.points[q][1]);
            const double w = geo.jacobian_weight(rule.weights[q]);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) local[i][j] += w * l[i] * l[j];
        }
        const auto& tri = mesh.triangles[t];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) trip.emplace_back(tri[i], tri[j], local[i][j]);
    }
    return detail::from_triplets(s.num_pressure_dofs, s.num_pressure_dofs, trip);
}

enum class IncompatibleSourcePolicy { Correct, Strict };

struct LoadVectors {
    Vector displacement;  // free displacement dofs
    Vector pressure;      // all vertices; Dirichlet entries zero
    bool mean_corrected = false;  // nonzero source integral removed (pure Neumann)
    double removed_integral = 0.0;
};

/**
 * Consistent loads <F, v> and <S, q> at time t.
 *
 * In the pure Neumann layout the discrete source is always made exactly
 * compatible by subtracting its integral times the mass of the constant. An
 * integral above quadrature level counts as incompatible data: Strict throws,
 * Correct flags the record.
 */
inline LoadVectors assemble_loads(const Spaces& s, const TriMesh& mesh, const SpaceTimeVector& force,
                                  const SpaceTimeScalar& source, double t,
                                  IncompatibleSourcePolicy policy = IncompatibleSourcePolicy::Correct) {
    const auto& rule = triangle_rule();
    LoadVectors out;
    out.displacement = Vector::Zero(s.num_free_displacement());
    out.pressure = Vector::Zero(s.num_pressure_dofs);
    Vector mass_of_one = Vector::Zero(s.num_pressure_dofs);
    for (std::size_t e = 0; e < mesh.num_triangles(); ++e) {
        const ElementGeometry geo(mesh, e);
        const auto dofs = detail::local_displacement_dofs(s, e);
        const auto& tri = mesh.triangles[e];
        for (int q = 0; q < rule.num_points; ++q) {
            const auto l = barycentric(rule.points[q][0], rule.points[q][1]);
            const auto phi = p2_values(l);
            const Point x = geo.map(rule.points[q][0], rule.points[q][1]);
            const double w = geo.jacobian_weight(rule.weights[q]);
            const auto fv = force(x.x, x.y, t);
            const double sv = source(x.x, x.y, t);
            if (!std::isfinite(fv[0]) || !std::isfinite(fv[1]) || !std::isfinite(sv)) {
                throw ConfigError("assemble_loads: non-finite source value");
            }
            for (int a = 0; a < 6; ++a) {
                if (dofs[a] >= 0) out.displacement[dofs[a]] += w * fv[0] * phi[a];
                if (dofs[6 + a] >= 0) out.displacement[dofs[6 + a]] += w * fv[1] * phi[a];
            }
            for (int i = 0; i < 3; ++i) {
                out.pressure[tri[i]] += w * sv * l[i];
                mass_of_one[tri[i]] += w * l[i];
            }
        }
    }
    if (s.zero_mean()) {
        const double integral = out.pressure.sum();
        const double area = mass_of_one.sum();
        const double scale = std::max(1.0, out.pressure.cwiseAbs().sum());
        if (std::abs(integral) > 1e-8 * scale) {
            if (policy == IncompatibleSourcePolicy::Strict) {
                throw IncompatibleSourceError("pure-Neumann source has nonzero integral " + std::to_string(integral) +
                                              " (strict mode)");
            }
            out.mean_corrected = true;
            out.removed_integral = integral;
        }
        out.pressure -= (integral / area) * mass_of_one;
    } else {
        for (int v = 0; v < s.num_pressure_dofs; ++v) {
            if (s.pressure_dirichlet[v]) out.pressure[v] = 0.0;
        }
    }
    return out;
}

}  // namespace biot
