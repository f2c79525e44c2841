/**
 * @file operators.hpp
 * @brief Elasticity solver, pressure-to-dilation map B, beta form and discrete dual norms.
 *
 * B p is the dilation of the clamped displacement driven by the pressure p:
 * solve E u = G^T p, then project div u onto the pressure space, M zeta = G u.
 * Constants are in the kernel because G^T 1 annihilates clamped fields.
 */
#pragma once

#include "biot/assembly.hpp"
#include "biot/linear_solve.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

namespace biot {

/// Factorized clamped elasticity operator.
class ElasticitySolver {
public:
    ElasticitySolver() = default;
    explicit ElasticitySolver(const SparseOperator& e) : solver_(e) {}

    /// Free-dof solution of E u = load.
    [[nodiscard]] Vector solve(const Vector& load) const { return solver_.solve(load); }
    [[nodiscard]] const SparseOperator& matrix() const { return solver_.matrix(); }

private:
    SpdSolver solver_;
};

/**
 * Immutable bundle of mesh, dof maps and the constant operators of one
 * discretization level. Cheap to copy (shared state).
 */
class Discretization {
public:
    Discretization(TriMesh mesh, double lambda, double mu) {
        validate(mesh);
        auto st = std::make_shared<State>();
        st->mesh = std::move(mesh);
        st->spaces = build_spaces(st->mesh);
        st->lambda = lambda;
        st->mu = mu;
        st->elasticity = assemble_elasticity(st->spaces, st->mesh, lambda, mu);
        st->divergence = assemble_divergence_coupling(st->spaces, st->mesh);
        st->mass = assemble_pressure_mass(st->spaces, st->mesh);
        st->stiffness = assemble_diffusion(st->spaces, st->mesh, constant_quadrature_field(st->mesh, 1.0), 1.0, 1.0);
        st->elasticity_solver = ElasticitySolver(st->elasticity);
        st->mass_solver = SpdSolver(st->mass);
        st->mass_of_one = st->mass * Vector::Ones(st->spaces.num_pressure_dofs);
        st->free_stiffness = build_free_stiffness(*st);
        state_ = std::move(st);
    }

    [[nodiscard]] const TriMesh& mesh() const { return state_->mesh; }
    [[nodiscard]] const Spaces& spaces() const { return state_->spaces; }
    [[nodiscard]] double lambda() const { return state_->lambda; }
    [[nodiscard]] double mu() const { return state_->mu; }
    [[nodiscard]] const SparseOperator& elasticity() const { return state_->elasticity; }
    [[nodiscard]] const SparseOperator& divergence() const { return state_->divergence; }
    [[nodiscard]] const SparseOperator& mass() const { return state_->mass; }
    /// k = 1 diffusion operator on all vertices.
    [[nodiscard]] const SparseOperator& stiffness() const { return state_->stiffness; }
    [[nodiscard]] const ElasticitySolver& elasticity_solver() const { return state_->elasticity_solver; }
    [[nodiscard]] const Vector& mass_of_one() const { return state_->mass_of_one; }

    [[nodiscard]] Vector solve_mass(const Vector& rhs) const { return state_->mass_solver.solve(rhs); }

    /// Solves the k = 1 pressure Laplacian on V (free nodes, plus the zero-mean row when pure Neumann).
    [[nodiscard]] Vector solve_free_stiffness(const Vector& free_rhs) const {
        const auto& s = spaces();
        if (s.num_free_pressure() == 0) throw SolverError("pressure space has no free dofs");
        Vector rhs = Vector::Zero(state_->free_stiffness->matrix().rows());
        rhs.head(free_rhs.size()) = free_rhs;
        return state_->free_stiffness->solve(rhs).head(free_rhs.size());
    }

private:
    struct State {
        TriMesh mesh;
        Spaces spaces;
        double lambda = 1.0;
        double mu = 1.0;
        SparseOperator elasticity, divergence, mass, stiffness;
        ElasticitySolver elasticity_solver;
        SpdSolver mass_solver;
        Vector mass_of_one;
        std::shared_ptr<IndefiniteSolver> free_stiffness;
    };

    static std::shared_ptr<IndefiniteSolver> build_free_stiffness(const State& st) {
        const auto& s = st.spaces;
        const int nf = s.num_free_pressure();
        if (nf == 0) return nullptr;
        const int extra = s.zero_mean() ? 1 : 0;
        Triplets trip;
        for (int k = 0; k < st.stiffness.outerSize(); ++k) {
            for (SparseOperator::InnerIterator it(st.stiffness, k); it; ++it) {
                const int r = s.pressure_free_index[it.row()];
                const int c = s.pressure_free_index[it.col()];
                if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
            }
        }
        if (extra) {
            for (int i = 0; i < nf; ++i) {
                const double m = st.mass_of_one[s.pressure_free_dofs[i]];
                trip.emplace_back(i, nf, m);
                trip.emplace_back(nf, i, m);
            }
        }
        return std::make_shared<IndefiniteSolver>(detail::from_triplets(nf + extra, nf + extra, trip));
    }

    std::shared_ptr<const State> state_;
};

/// Displacement Field (full numbering) solving e(u, v) = load(v).
inline Field solve_elasticity(const Discretization& d, const Vector& free_load) {
    if (free_load.size() != d.spaces().num_free_displacement()) {
        throw std::invalid_argument("solve_elasticity: load dimension mismatch");
    }
    return Field::displacement(extend_displacement(d.spaces(), d.elasticity_solver().solve(free_load)));
}

/// zeta = L2 projection of div u onto the pressure space.
inline Field evaluate_dilation(const Field& u, const Discretization& d) {
    if (u.kind != SpaceKind::Displacement) throw std::invalid_argument("evaluate_dilation: expected displacement");
    const Vector gu = d.divergence() * restrict_displacement(d.spaces(), u.coefficients);
    return Field::pressure(d.solve_mass(gu));
}

/// B p = div E^{-1}(-grad p), realized as M^{-1} G E^{-1} G^T p.
inline Field apply_B(const Field& p, const Discretization& d) {
    if (p.kind != SpaceKind::Pressure) throw std::invalid_argument("apply_B: expected pressure field");
    const Vector u = d.elasticity_solver().solve(d.divergence().transpose() * p.coefficients);
    return Field::pressure(d.solve_mass(d.divergence() * u));
}

inline constexpr int default_dense_cap = 2000;

struct DenseBRealization {
    Eigen::MatrixXd b;     // B_d
    Eigen::MatrixXd mass;  // M_p
    BcLayout layout = BcLayout::AllDirichlet;

    /// max |M B - (M B)^T| / max |M B|
    [[nodiscard]] double self_adjointness_residual() const {
        const Eigen::MatrixXd mb = mass * b;
        const double scale = mb.cwiseAbs().maxCoeff();
        return scale == 0.0 ? 0.0 : (mb - mb.transpose()).cwiseAbs().maxCoeff() / scale;
    }
};

inline DenseBRealization dense_B_matrix(const Discretization& d, int cap = default_dense_cap) {
    const int n = d.spaces().num_pressure_dofs;
    if (n > cap) {
        throw CapExceededError("dense B realization needs " + std::to_string(n) + " pressure dofs, cap is " +
                               std::to_string(cap));
    }
    DenseBRealization r;
    r.layout = d.mesh().layout;
    r.mass = Eigen::MatrixXd(d.mass());
    r.b.resize(n, n);
    for (int j = 0; j < n; ++j) {
        r.b.col(j) = apply_B(Field::pressure(Vector::Unit(n, j)), d).coefficients;
    }
    return r;
}

/// Eigenvalues of M B x = theta M x in ascending order.
inline Vector b_spectrum(const DenseBRealization& r) {
    const Eigen::MatrixXd mb = r.mass * r.b;
    const Eigen::MatrixXd sym = 0.5 * (mb + mb.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, r.mass, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw SolverError("generalized eigensolve failed");
    return eig.eigenvalues();
}

/// beta(p, q) = (B p, q) in L2.
inline double beta_form(const Field& p, const Field& q, const Discretization& d) {
    return apply_B(p, d).coefficients.dot(d.mass() * q.coefficients);
}

inline double beta_form(const Field& p, const Field& q, const DenseBRealization& r) {
    return (r.b * p.coefficients).dot(r.mass * q.coefficients);
}

enum class RieszNorm { ElasticEnergy, H1Pressure };

/**
 * Discrete dual norm of a load vector.
 * ElasticEnergy: load on free displacement dofs, sqrt(f^T E^{-1} f).
 * H1Pressure: load on all vertices (Dirichlet entries ignored), measured
 * against the gradient norm on V; on V_N the sup runs over zero-mean q.
 */
inline double dual_norm(const Vector& load, RieszNorm riesz, const Discretization& d) {
    if (riesz == RieszNorm::ElasticEnergy) {
        if (load.size() != d.spaces().num_free_displacement()) throw std::invalid_argument("dual_norm: size mismatch");
        if (load.size() == 0) throw SolverError("dual_norm: zero-dimensional displacement space");
        const Vector x = d.elasticity_solver().solve(load);
        return std::sqrt(std::max(0.0, load.dot(x)));
    }
    if (load.size() != d.spaces().num_pressure_dofs) throw std::invalid_argument("dual_norm: size mismatch");
    if (d.spaces().num_free_pressure() == 0) throw SolverError("dual_norm: zero-dimensional pressure space");
    const Vector f = restrict_pressure(d.spaces(), load);
    const Vector x = d.solve_free_stiffness(f);
    return std::sqrt(std::max(0.0, f.dot(x)));
}

}  // namespace biot
