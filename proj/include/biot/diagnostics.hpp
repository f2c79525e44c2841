/**
 * @file diagnostics.hpp
 * @brief Numerical audits: energy inequality, operator spectra, reduced/monolithic
 *        equivalence, Neumann compatibility and manufactured-solution rates.
 */
#pragma once

#include "biot/reduced.hpp"
#include "biot/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace biot {

// ---------------------------------------------------------------------------
// Energy inequality
// ---------------------------------------------------------------------------

struct EnergyRow {
    int step = 0;
    double time = 0.0;
    double u_energy = 0.0;         // e(u^n, u^n)
    double dissipation_cum = 0.0;  // sum_m dt (k grad p^m, grad p^m)
    double lhs = 0.0;              // u_energy + 2 dissipation_cum
    double rhs = 0.0;
    double margin = 0.0;           // rhs - lhs
};

struct EnergyLedger {
    std::vector<EnergyRow> rows;
    double f0_dual_sq = 0.0;          // ||F(0)||^2_{V'}
    double initial_term = 0.0;        // ||u^1||^2_E + ||d0||^2_{L2}
    double d0_l2_sq = 0.0;
    std::string bound_variant = "first-step-energy+d0";
    bool inequality_holds = true;     // at every recorded time
};

/**
 * Evaluates the a priori energy bound along a stored trajectory:
 *
 *   ||u(t)||^2 + 2 int_0^t (k grad p, grad p)
 *     <= 2 (||F(0)||^2 + 2 ||F(t)||^2 + 2 U0 + k1^{-1} int ||S||^2 + int ||dF/dt||^2) e^{2t}.
 *
 * The solver never consumes an initial displacement, so U0 is replaced by
 * ||u^1||_E^2 + ||d0||_{L2}^2. Time integrals are Riemann sums over the step
 * grid and dF/dt uses backward difference quotients of the assembled loads.
 * The dissipation uses the permeability k(z) the step was solved with.
 */
inline EnergyLedger energy_audit(const Trajectory& traj, const BiotProblem& pb) {
    if (static_cast<int>(traj.steps.size()) != pb.num_steps() || std::abs(traj.dt - pb.dt) > 1e-14 * pb.dt) {
        throw std::invalid_argument("energy_audit: trajectory does not match the problem");
    }
    const auto& d = pb.disc;
    const auto& s = d.spaces();
    EnergyLedger ledger;
    if (traj.steps.empty()) return ledger;
    const LoadHistory loads = assemble_load_history(pb);
    const LoadVectors load0 =
        assemble_loads(s, d.mesh(), pb.sources.force, pb.sources.source, 0.0, IncompatibleSourcePolicy::Correct);
    const auto energy = [&](const Field& u) {
        const Vector uf = restrict_displacement(s, u.coefficients);
        return uf.dot(d.elasticity() * uf);
    };
    const auto dual_sq_u = [&](const Vector& f) { return f.size() == 0 ? 0.0 : std::pow(dual_norm(f, RieszNorm::ElasticEnergy, d), 2); };
    const bool has_pressure_dofs = s.num_free_pressure() > 0;
    const auto dual_sq_p = [&](const Vector& g) {
        return has_pressure_dofs ? std::pow(dual_norm(g, RieszNorm::H1Pressure, d), 2) : 0.0;
    };

    ledger.f0_dual_sq = dual_sq_u(load0.displacement);
    ledger.d0_l2_sq = traj.d0.coefficients.dot(d.mass() * traj.d0.coefficients);
    ledger.initial_term = energy(traj.steps.front().u) + ledger.d0_l2_sq;

    double dissipation = 0.0;
    double source_int = 0.0;
    double dfdt_int = 0.0;
    Vector f_prev = load0.displacement;
    for (std::size_t n = 0; n < traj.steps.size(); ++n) {
        const auto& st = traj.steps[n];
        const auto k = permeability_at_quadrature(pb.perm, st.z.coefficients, d.mesh());
        const SparseOperator a = assemble_diffusion(s, d.mesh(), k, pb.perm.k1, pb.perm.k2);
        dissipation += pb.dt * st.p.coefficients.dot(a * st.p.coefficients);
        source_int += pb.dt * dual_sq_p(loads[n].pressure);
        const Vector& f = loads[n].displacement;
        dfdt_int += pb.dt * dual_sq_u((f - f_prev) / pb.dt);
        f_prev = f;

        EnergyRow row;
        row.step = static_cast<int>(n) + 1;
        row.time = st.time;
        row.u_energy = energy(st.u);
        row.dissipation_cum = dissipation;
        row.lhs = row.u_energy + 2.0 * dissipation;
        row.rhs = 2.0 *
                  (ledger.f0_dual_sq + 2.0 * dual_sq_u(f) + 2.0 * ledger.initial_term + source_int / pb.perm.k1 +
                   dfdt_int) *
                  std::exp(2.0 * st.time);
        row.margin = row.rhs - row.lhs;
        if (!(row.lhs <= row.rhs + 1e-9 * row.rhs)) ledger.inequality_holds = false;
        ledger.rows.push_back(row);
    }
    return ledger;
}

// ---------------------------------------------------------------------------
// Operator audit
// ---------------------------------------------------------------------------

struct OperatorAuditRow {
    int n = 0;
    int pressure_dofs = 0;
    int zero_multiplicity = 0;
    double theta_min = 0.0;          // most negative eigenvalue
    double theta_min_nonzero = 0.0;  // smallest eigenvalue above the zero threshold
    double theta_max = 0.0;
    double self_adjointness = 0.0;
    double kernel_residual = 0.0;    // max |B 1|
    double drift = 0.0;              // relative change of theta_min_nonzero vs previous level
};

struct OperatorAudit {
    BcLayout layout = BcLayout::AllNeumann;
    std::vector<OperatorAuditRow> rows;
};

inline constexpr double zero_eigenvalue_threshold = 1e-10;

inline OperatorAuditRow audit_operator_level(const Discretization& d, int cap = default_dense_cap) {
    const DenseBRealization r = dense_B_matrix(d, cap);
    const Vector ev = b_spectrum(r);
    OperatorAuditRow row;
    row.n = d.mesh().subdivisions;
    row.pressure_dofs = static_cast<int>(ev.size());
    row.theta_min = ev.minCoeff();
    row.theta_max = ev.maxCoeff();
    row.theta_min_nonzero = std::numeric_limits<double>::infinity();
    for (int i = 0; i < ev.size(); ++i) {
        if (std::abs(ev[i]) <= zero_eigenvalue_threshold) {
            ++row.zero_multiplicity;
        } else if (ev[i] > 0.0) {
            row.theta_min_nonzero = std::min(row.theta_min_nonzero, ev[i]);
        }
    }
    row.self_adjointness = r.self_adjointness_residual();
    row.kernel_residual = (r.b * Vector::Ones(r.b.cols())).cwiseAbs().maxCoeff();
    return row;
}

inline OperatorAudit operator_audit(const std::vector<int>& levels, BcLayout layout, const Physics& physics = {},
                                    int cap = default_dense_cap) {
    OperatorAudit audit;
    audit.layout = layout;
    for (int n : levels) {
        const int dofs = (n + 1) * (n + 1);
        if (dofs > cap) throw CapExceededError("operator_audit: level n=" + std::to_string(n) + " exceeds dense cap");
    }
    for (int n : levels) {
        const Discretization d(build_unit_square_mesh(n, layout), physics.lambda, physics.mu);
        OperatorAuditRow row = audit_operator_level(d, cap);
        if (!audit.rows.empty()) {
            const double prev = audit.rows.back().theta_min_nonzero;
            row.drift = std::abs(row.theta_min_nonzero - prev) / prev;
        }
        audit.rows.push_back(row);
    }
    return audit;
}

// ---------------------------------------------------------------------------
// Reduced / monolithic comparison
// ---------------------------------------------------------------------------

struct OracleDiscrepancy {
    double relative_l2l2 = 0.0;
    std::vector<double> step_max_abs;
};

/// Runs the monolithic march and the dense reduced march on the same frozen z.
inline OracleDiscrepancy oracle_compare(const BiotProblem& pb, const DilationHistory& z,
                                        int cap = default_dense_cap) {
    const DenseBRealization r = dense_B_matrix(pb.disc, cap);
    const Trajectory mono = solve_linear_biot(pb, z);
    const std::vector<Field> red = reduced_solve(pb, r, z);
    OracleDiscrepancy out;
    double num = 0.0;
    double den = 0.0;
    for (std::size_t n = 0; n < red.size(); ++n) {
        const Vector diff = mono.steps[n].p.coefficients - red[n].coefficients;
        const Vector& pm = mono.steps[n].p.coefficients;
        num += pb.dt * diff.dot(pb.disc.mass() * diff);
        den += pb.dt * pm.dot(pb.disc.mass() * pm);
        out.step_max_abs.push_back(diff.cwiseAbs().maxCoeff());
    }
    out.relative_l2l2 = num == 0.0 ? 0.0 : std::sqrt(num / std::max(den, std::numeric_limits<double>::min()));
    return out;
}

// ---------------------------------------------------------------------------
// Neumann compatibility
// ---------------------------------------------------------------------------

struct CompatibilityRecord {
    std::vector<double> zeta_mean_abs;
    std::vector<double> p_mean_abs;
    double max_drift = 0.0;
    bool source_mean_corrected = false;
};

inline CompatibilityRecord compatibility_check(const Trajectory& traj, const BiotProblem& pb) {
    if (pb.disc.mesh().layout != BcLayout::AllNeumann) {
        throw std::invalid_argument("compatibility_check: requires the pure Neumann layout");
    }
    CompatibilityRecord rec;
    rec.source_mean_corrected = traj.source_mean_corrected;
    for (const auto& st : traj.steps) {
        rec.zeta_mean_abs.push_back(std::abs(mean_value(st.zeta, pb.disc.mesh())));
        rec.p_mean_abs.push_back(std::abs(mean_value(st.p, pb.disc.mesh())));
        rec.max_drift = std::max({rec.max_drift, rec.zeta_mean_abs.back(), rec.p_mean_abs.back()});
    }
    return rec;
}

// ---------------------------------------------------------------------------
// Manufactured-solution convergence
// ---------------------------------------------------------------------------

struct FieldErrors {
    double u_h1 = 0.0;
    double p_l2 = 0.0;
    double p_h1semi = 0.0;
    double zeta_l2 = 0.0;
};

/// Errors against the exact solution at time t, integrated with the element quadrature rule.
inline FieldErrors field_errors(const Discretization& d, const ExactSolution& ex, const TrajectoryStep& st) {
    const auto& s = d.spaces();
    const auto& mesh = d.mesh();
    const auto& rule = triangle_rule();
    const int nq = s.num_quad_nodes();
    double eu = 0.0, ep = 0.0, egp = 0.0, ez = 0.0;
    const Vector& u = st.u.coefficients;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const ElementGeometry geo(mesh, t);
        const auto& nodes = s.element_quad_nodes[t];
        const auto& tri = mesh.triangles[t];
        for (int q = 0; q < rule.num_points; ++q) {
            const auto l = barycentric(rule.points[q][0], rule.points[q][1]);
            const auto phi = p2_values(l);
            const auto g = p2_gradients(l, geo.grad_lambda);
            const Point x = geo.map(rule.points[q][0], rule.points[q][1]);
            const double w = geo.jacobian_weight(rule.weights[q]);
            double uh[2] = {0, 0};
            double guh[4] = {0, 0, 0, 0};
            for (int a = 0; a < 6; ++a) {
                for (int c = 0; c < 2; ++c) {
                    const double coef = u[c * nq + nodes[a]];
                    uh[c] += coef * phi[a];
                    guh[2 * c] += coef * g[a].x;
                    guh[2 * c + 1] += coef * g[a].y;
                }
            }
            double ph = 0.0, zh = 0.0, gph[2] = {0, 0};
            for (int i = 0; i < 3; ++i) {
                ph += st.p.coefficients[tri[i]] * l[i];
                zh += st.zeta.coefficients[tri[i]] * l[i];
                gph[0] += st.p.coefficients[tri[i]] * geo.grad_lambda[i].x;
                gph[1] += st.p.coefficients[tri[i]] * geo.grad_lambda[i].y;
            }
            const auto ue = ex.u(x.x, x.y, st.time);
            const auto gue = ex.grad_u(x.x, x.y, st.time);
            const auto gpe = ex.grad_p(x.x, x.y, st.time);
            for (int c = 0; c < 2; ++c) eu += w * std::pow(uh[c] - ue[c], 2);
            for (int c = 0; c < 4; ++c) eu += w * std::pow(guh[c] - gue[c], 2);
            ep += w * std::pow(ph - ex.p(x.x, x.y, st.time), 2);
            egp += w * (std::pow(gph[0] - gpe[0], 2) + std::pow(gph[1] - gpe[1], 2));
            ez += w * std::pow(zh - ex.div_u(x.x, x.y, st.time), 2);
        }
    }
    return {std::sqrt(eu), std::sqrt(ep), std::sqrt(egp), std::sqrt(ez)};
}

enum class DtRule { DtProportionalH2, DtFixedTiny };

struct MmsSettings {
    Physics physics{};
    double k0 = 1.0;
    double T = 0.1;
    double dt_coefficient = 0.5;  // DtProportionalH2: dt ~ coefficient * h^2
    double tiny_dt = 1e-4;        // DtFixedTiny
};

struct RatesRow {
    int level = 0;
    int n = 0;
    double h = 0.0;
    double dt = 0.0;
    FieldErrors errors;
    double order_u = 0.0;  // vs previous level; 0 on the first
    double order_p = 0.0;
    double order_p_h1semi = 0.0;
    double order_zeta = 0.0;
};

struct RatesTable {
    std::string case_name;
    std::vector<RatesRow> rows;
};

/// Largest dt <= target that divides T.
inline double fitted_time_step(double T, double target) {
    const double steps = std::max(1.0, std::ceil(T / target - 1e-9));
    return T / steps;
}

inline BiotProblem manufactured_problem(std::string_view case_name, int n, double dt, const MmsSettings& cfg) {
    const Physics& ph = cfg.physics;
    const PermeabilityModel perm = PermeabilityModel::constant(cfg.k0, std::min(cfg.k0, 1e-3), std::max(cfg.k0, 1e3));
    const SourceCase probe = make_source_case(case_name, ph, perm);
    if (!probe.exact) throw ConfigError("case '" + std::string(case_name) + "' has no exact solution");
    const BcLayout layout = probe.layouts.empty() ? BcLayout::AllDirichlet : probe.layouts.front();
    return make_problem(build_unit_square_mesh(n, layout), perm, ph, case_name, dt, cfg.T);
}

inline RatesTable mms_convergence(std::string_view case_name, const std::vector<int>& levels, DtRule rule,
                                  const MmsSettings& cfg = {}) {
    if (levels.empty()) throw ConfigError("mms_convergence: no levels");
    for (std::size_t i = 1; i < levels.size(); ++i) {
        if (levels[i] <= levels[i - 1]) throw ConfigError("mms_convergence: levels must be strictly increasing");
    }
    RatesTable table;
    table.case_name = std::string(case_name);
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const int n = levels[i];
        const double h = 1.0 / n;
        const double dt = rule == DtRule::DtProportionalH2 ? fitted_time_step(cfg.T, cfg.dt_coefficient * h * h)
                                                           : fitted_time_step(cfg.T, cfg.tiny_dt);
        const BiotProblem pb = manufactured_problem(case_name, n, dt, cfg);
        const Trajectory traj = solve_linear_biot(pb, constant_history(pb, Vector::Zero(pb.disc.spaces().num_pressure_dofs)));
        RatesRow row;
        row.level = static_cast<int>(i);
        row.n = n;
        row.h = h;
        row.dt = dt;
        row.errors = field_errors(pb.disc, *pb.sources.exact, traj.steps.back());
        if (!table.rows.empty()) {
            const auto& prev = table.rows.back();
            const double ratio = std::log(prev.h / h);
            row.order_u = std::log(prev.errors.u_h1 / row.errors.u_h1) / ratio;
            row.order_p = std::log(prev.errors.p_l2 / row.errors.p_l2) / ratio;
            row.order_p_h1semi = std::log(prev.errors.p_h1semi / row.errors.p_h1semi) / ratio;
            row.order_zeta = std::log(prev.errors.zeta_l2 / row.errors.zeta_l2) / ratio;
        }
        table.rows.push_back(row);
    }
    return table;
}

struct TemporalRow {
    double dt = 0.0;
    double p_l2l2 = 0.0;  // sqrt(sum_n dt ||p^n - p*(t_n)||^2)
    double order = 0.0;
};

/// Time-refinement study at a fixed mesh: pressure error in the discrete L2(0,T; L2) norm.
inline std::vector<TemporalRow> mms_temporal(std::string_view case_name, int n, const std::vector<double>& dts,
                                             const MmsSettings& cfg = {}) {
    std::vector<TemporalRow> rows;
    for (double dt : dts) {
        const BiotProblem pb = manufactured_problem(case_name, n, dt, cfg);
        const Trajectory traj = solve_linear_biot(pb, constant_history(pb, Vector::Zero(pb.disc.spaces().num_pressure_dofs)));
        double sum = 0.0;
        for (const auto& st : traj.steps) sum += dt * std::pow(field_errors(pb.disc, *pb.sources.exact, st).p_l2, 2);
        TemporalRow row{dt, std::sqrt(sum), 0.0};
        if (!rows.empty()) row.order = std::log(rows.back().p_l2l2 / row.p_l2l2) / std::log(rows.back().dt / dt);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace biot
