/**
 * @file solver.hpp
 * @brief Backward-Euler monolithic time marching and Picard resolution of k(div u).
 *
 * Each step solves the symmetric saddle system
 *
 *   [  E          -alpha G^T        0 ] [u]   [ f                      ]
 *   [ -alpha G    -(c0 M + dt A)    m ] [p] = [ -(dt s + content_prev) ]
 *   [  0           m^T              0 ] [l]   [ 0                      ]
 *
 * on free dofs, where content_prev = alpha G u_prev + c0 M p_prev (alpha M d0
 * on the first step) and the last row/column exists only in the pure Neumann
 * layout (m = M 1, enforcing zero-mean pressure).
 */
#pragma once

#include "biot/problem.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace biot {

/// Space-time dilation field, one pressure-space coefficient vector per time step (piecewise constant in time).
using DilationHistory = std::vector<Vector>;

struct TrajectoryStep {
    double time = 0.0;
    Field u;     // displacement, full numbering
    Field p;     // pressure, all vertices
    Field zeta;  // L2-projected dilation of u
    Field z;     // dilation argument of k used in this step
    double multiplier = 0.0;  // zero-mean Lagrange multiplier (pure Neumann)
};

struct Trajectory {
    double dt = 0.0;
    Field d0;
    std::vector<TrajectoryStep> steps;  // times dt, 2 dt, ..., T
    bool source_mean_corrected = false;

    [[nodiscard]] DilationHistory dilations() const {
        DilationHistory out;
        out.reserve(steps.size());
        for (const auto& s : steps) out.push_back(s.zeta.coefficients);
        return out;
    }
};

using LoadHistory = std::vector<LoadVectors>;

/// Loads at t_1 ... t_N.
inline LoadHistory assemble_load_history(const BiotProblem& pb) {
    LoadHistory loads;
    loads.reserve(pb.num_steps());
    for (int n = 1; n <= pb.num_steps(); ++n) {
        loads.push_back(assemble_loads(pb.disc.spaces(), pb.disc.mesh(), pb.sources.force, pb.sources.source,
                                       pb.time(n), pb.policy));
    }
    return loads;
}

/// alpha (div u, q) + c0 (p, q) for all q (all vertices).
inline Vector storage_content(const BiotProblem& pb, const Field& u, const Field& p) {
    const auto& d = pb.disc;
    return pb.physics.alpha * (d.divergence() * restrict_displacement(d.spaces(), u.coefficients)) +
           pb.physics.c0 * (d.mass() * p.coefficients);
}

inline Vector initial_content(const BiotProblem& pb) {
    return pb.physics.alpha * (pb.disc.mass() * pb.d0.coefficients);
}

struct StepResult {
    Field u;
    Field p;
    double multiplier = 0.0;
};

namespace detail {

inline SparseOperator step_matrix(const BiotProblem& pb, const SparseOperator& diffusion, double dt) {
    const auto& d = pb.disc;
    const auto& s = d.spaces();
    const int nu = s.num_free_displacement();
    const int npf = s.num_free_pressure();
    const int extra = s.zero_mean() ? 1 : 0;
    const double alpha = pb.physics.alpha;
    const double c0 = pb.physics.c0;
    Triplets trip;
    trip.reserve(d.elasticity().nonZeros() + 2 * d.divergence().nonZeros() + 2 * diffusion.nonZeros() + 2 * npf);
    for (int k = 0; k < d.elasticity().outerSize(); ++k)
        for (SparseOperator::InnerIterator it(d.elasticity(), k); it; ++it)
            trip.emplace_back(it.row(), it.col(), it.value());
    for (int k = 0; k < d.divergence().outerSize(); ++k) {
        for (SparseOperator::InnerIterator it(d.divergence(), k); it; ++it) {
            const int fi = s.pressure_free_index[it.row()];
            if (fi < 0) continue;
            trip.emplace_back(nu + fi, it.col(), -alpha * it.value());
            trip.emplace_back(it.col(), nu + fi, -alpha * it.value());
        }
    }
    const SparseOperator block = (c0 * d.mass() + dt * diffusion).pruned();
    for (int k = 0; k < block.outerSize(); ++k) {
        for (SparseOperator::InnerIterator it(block, k); it; ++it) {
            const int r = s.pressure_free_index[it.row()];
            const int c = s.pressure_free_index[it.col()];
            if (r >= 0 && c >= 0) trip.emplace_back(nu + r, nu + c, -it.value());
        }
    }
    if (extra) {
        for (int i = 0; i < npf; ++i) {
            const double m = d.mass_of_one()[s.pressure_free_dofs[i]];
            trip.emplace_back(nu + i, nu + npf, m);
            trip.emplace_back(nu + npf, nu + i, m);
        }
    }
    const int n = nu + npf + extra;
    return from_triplets(n, n, trip);
}

}  // namespace detail

/**
 * One backward-Euler step given the previous storage content
 * (see storage_content / initial_content).
 */
inline StepResult step_linear(const BiotProblem& pb, const Vector& content_prev, const QuadratureField& k,
                              const LoadVectors& loads, double dt) {
    const auto& d = pb.disc;
    const auto& s = d.spaces();
    const SparseOperator diffusion = assemble_diffusion(s, d.mesh(), k, pb.perm.k1, pb.perm.k2);
    const int nu = s.num_free_displacement();
    const int npf = s.num_free_pressure();
    const int extra = s.zero_mean() ? 1 : 0;

    Vector rhs = Vector::Zero(nu + npf + extra);
    rhs.head(nu) = loads.displacement;
    rhs.segment(nu, npf) = -restrict_pressure(s, dt * loads.pressure + content_prev);

    Vector x;
    try {
        const IndefiniteSolver solver(detail::step_matrix(pb, diffusion, dt));
        x = solver.solve(rhs);
    } catch (const SolverError& e) {
        throw SolverError(std::string(e.what()) + " (layout " + std::string(to_string(d.mesh().layout)) + ")");
    }
    StepResult out;
    out.u = Field::displacement(extend_displacement(s, x.head(nu)));
    out.p = Field::pressure(extend_pressure(s, x.segment(nu, npf)));
    out.multiplier = extra ? x[nu + npf] : 0.0;
    return out;
}

/// Step from an explicit previous state (u^n, p^n).
inline StepResult step_linear(const BiotProblem& pb, const Field& u_prev, const Field& p_prev,
                              const QuadratureField& k, const LoadVectors& loads, double dt) {
    return step_linear(pb, storage_content(pb, u_prev, p_prev), k, loads, dt);
}

inline DilationHistory constant_history(const BiotProblem& pb, const Vector& z) {
    return DilationHistory(static_cast<std::size_t>(pb.num_steps()), z);
}

/// Linear march with k = k(z), z frozen per step.
inline Trajectory solve_linear_biot(const BiotProblem& pb, const DilationHistory& z, const LoadHistory& loads) {
    const int nsteps = pb.num_steps();
    if (static_cast<int>(z.size()) != nsteps || static_cast<int>(loads.size()) != nsteps) {
        throw std::invalid_argument("solve_linear_biot: history length does not match the number of steps");
    }
    Trajectory traj;
    traj.dt = pb.dt;
    traj.d0 = pb.d0;
    for (const auto& l : loads) traj.source_mean_corrected = traj.source_mean_corrected || l.mean_corrected;
    Vector content = initial_content(pb);
    for (int n = 1; n <= nsteps; ++n) {
        const Vector& zn = z[n - 1];
        const auto k = permeability_at_quadrature(pb.perm, zn, pb.disc.mesh());
        StepResult r = step_linear(pb, content, k, loads[n - 1], pb.dt);
        TrajectoryStep st;
        st.time = pb.time(n);
        st.zeta = evaluate_dilation(r.u, pb.disc);
        st.z = Field::pressure(zn);
        st.multiplier = r.multiplier;
        content = storage_content(pb, r.u, r.p);
        st.u = std::move(r.u);
        st.p = std::move(r.p);
        traj.steps.push_back(std::move(st));
    }
    return traj;
}

inline Trajectory solve_linear_biot(const BiotProblem& pb, const DilationHistory& z) {
    return solve_linear_biot(pb, z, assemble_load_history(pb));
}

/// Discrete fixed-point map: the dilation trace of the linear solve with k(z).
inline DilationHistory fixed_point_map(const BiotProblem& pb, const DilationHistory& z, const LoadHistory& loads) {
    return solve_linear_biot(pb, z, loads).dilations();
}

inline DilationHistory fixed_point_map(const BiotProblem& pb, const DilationHistory& z) {
    return fixed_point_map(pb, z, assemble_load_history(pb));
}

/// sqrt(sum_n dt ||v_n||^2_{L2}).
inline double space_time_l2(const BiotProblem& pb, const DilationHistory& v) {
    double sum = 0.0;
    for (const auto& vn : v) sum += pb.dt * vn.dot(pb.disc.mass() * vn);
    return std::sqrt(sum);
}

enum class PicardMode { Global, PerStep };

struct PicardReport {
    PicardMode mode = PicardMode::Global;
    std::vector<double> residuals;   // one per iteration, in execution order
    std::vector<int> step_of_residual;  // PerStep: time step of each residual; Global: 0
    bool converged = false;
    int iterations = 0;
};

struct PicardResult {
    Trajectory trajectory;
    PicardReport report;
};

/**
 * Fixed-point iteration z_{m+1} = F(z_m).
 *
 * Global mode applies F to the whole space-time history and stops when
 * ||z_{m+1} - z_m||_{L2(L2)} <= tol max(1, ||z_{m+1}||). PerStep mode runs the
 * same iteration inside each time step (L2 norm at that step) before
 * advancing. Non-convergence is reported, never thrown; the trajectory
 * returned is the last iterate.
 */
inline PicardResult picard_solve(const BiotProblem& pb, const DilationHistory& z0, double tol, int max_iter,
                                 PicardMode mode) {
    if (!(tol > 0.0)) throw ConfigError("picard tolerance must be positive");
    if (max_iter < 1) throw ConfigError("picard max_iter must be >= 1");
    const LoadHistory loads = assemble_load_history(pb);
    PicardResult out;
    out.report.mode = mode;

    if (mode == PicardMode::Global) {
        DilationHistory z = z0;
        for (int m = 1; m <= max_iter; ++m) {
            Trajectory traj = solve_linear_biot(pb, z, loads);
            DilationHistory zeta = traj.dilations();
            DilationHistory diff(zeta.size());
            for (std::size_t i = 0; i < zeta.size(); ++i) diff[i] = zeta[i] - z[i];
            const double r = space_time_l2(pb, diff);
            const double scale = std::max(1.0, space_time_l2(pb, zeta));
            out.report.residuals.push_back(r);
            out.report.step_of_residual.push_back(0);
            out.report.iterations = m;
            out.trajectory = std::move(traj);
            z = std::move(zeta);
            if (r <= tol * scale) {
                out.report.converged = true;
                break;
            }
        }
        return out;
    }

    // Per-step mode.
    const int nsteps = pb.num_steps();
    if (static_cast<int>(z0.size()) != nsteps) throw std::invalid_argument("picard_solve: z0 length mismatch");
    Trajectory& traj = out.trajectory;
    traj.dt = pb.dt;
    traj.d0 = pb.d0;
    for (const auto& l : loads) traj.source_mean_corrected = traj.source_mean_corrected || l.mean_corrected;
    Vector content = initial_content(pb);
    bool all_converged = true;
    Vector z = z0[0];
    for (int n = 1; n <= nsteps; ++n) {
        bool converged = false;
        StepResult r;
        Vector zeta;
        Vector z_used;
        for (int m = 1; m <= max_iter; ++m) {
            const auto k = permeability_at_quadrature(pb.perm, z, pb.disc.mesh());
            r = step_linear(pb, content, k, loads[n - 1], pb.dt);
            zeta = evaluate_dilation(r.u, pb.disc).coefficients;
            const Vector diff = zeta - z;
            const double res = std::sqrt(diff.dot(pb.disc.mass() * diff));
            const double scale = std::max(1.0, std::sqrt(zeta.dot(pb.disc.mass() * zeta)));
            out.report.residuals.push_back(res);
            out.report.step_of_residual.push_back(n);
            ++out.report.iterations;
            z_used = z;
            z = zeta;
            if (res <= tol * scale) {
                converged = true;
                break;
            }
        }
        all_converged = all_converged && converged;
        TrajectoryStep st;
        st.time = pb.time(n);
        st.zeta = Field::pressure(zeta);
        st.z = Field::pressure(z_used);
        st.multiplier = r.multiplier;
        content = storage_content(pb, r.u, r.p);
        st.u = std::move(r.u);
        st.p = std::move(r.p);
        traj.steps.push_back(std::move(st));
    }
    out.report.converged = all_converged;
    return out;
}

inline PicardResult picard_solve(const BiotProblem& pb, const Vector& z0, double tol, int max_iter, PicardMode mode) {
    return picard_solve(pb, constant_history(pb, z0), tol, max_iter, mode);
}

struct WeakFormResidual {
    double momentum = 0.0;  // max over steps, relative
    double mass = 0.0;
};

enum class PermeabilityArgument { StoredZ, Dilation };

/**
 * Relative residuals of both discrete weak-form equations at every step.
 * With PermeabilityArgument::Dilation the permeability is re-evaluated at
 * the trajectory's own dilation, which measures the nonlinear consistency
 * k = k(div u).
 */
inline WeakFormResidual weak_form_residual(const BiotProblem& pb, const Trajectory& traj,
                                           PermeabilityArgument arg = PermeabilityArgument::Dilation) {
    const auto& d = pb.disc;
    const auto& s = d.spaces();
    const LoadHistory loads = assemble_load_history(pb);
    const double alpha = pb.physics.alpha;
    WeakFormResidual out;
    Vector content = initial_content(pb);
    for (std::size_t n = 0; n < traj.steps.size(); ++n) {
        const auto& st = traj.steps[n];
        const Vector uf = restrict_displacement(s, st.u.coefficients);
        const Vector eu = d.elasticity() * uf;
        const Vector gp = alpha * (d.divergence().transpose() * st.p.coefficients);
        const Vector& f = loads[n].displacement;
        const double scale1 = std::max({eu.norm(), gp.norm(), f.norm(), std::numeric_limits<double>::min()});
        out.momentum = std::max(out.momentum, (eu - gp - f).norm() / scale1);

        const Vector& zarg = arg == PermeabilityArgument::Dilation ? st.zeta.coefficients : st.z.coefficients;
        const auto k = permeability_at_quadrature(pb.perm, zarg, d.mesh());
        const SparseOperator a = assemble_diffusion(s, d.mesh(), k, pb.perm.k1, pb.perm.k2);
        const Vector new_content = storage_content(pb, st.u, st.p);
        const Vector change = new_content - content;
        const Vector diff = pb.dt * (a * st.p.coefficients);
        const Vector src = pb.dt * loads[n].pressure;
        const Vector mult = st.multiplier * d.mass_of_one();
        const Vector r2 = restrict_pressure(s, change + diff - src - mult);
        const double scale2 = std::max({restrict_pressure(s, change).norm(), restrict_pressure(s, diff).norm(),
                                        restrict_pressure(s, src).norm(), restrict_pressure(s, content).norm(),
                                        std::numeric_limits<double>::min()});
        out.mass = std::max(out.mass, r2.norm() / scale2);
        content = new_content;
    }
    return out;
}

}  // namespace biot
