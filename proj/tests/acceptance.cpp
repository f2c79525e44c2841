// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include "app.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace fs = std::filesystem;
using namespace biot;

namespace {

constexpr double pi = std::numbers::pi;
constexpr BcLayout all_layouts[] = {BcLayout::AllDirichlet, BcLayout::AllNeumann, BcLayout::MixedLeftDirichlet};

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

Vector zeros(const BiotProblem& pb) { return Vector::Zero(pb.disc.spaces().num_pressure_dofs); }

Vector bump(const BiotProblem& pb) {
    return interpolate([](double x, double y) { return 0.1 * std::sin(pi * x) * std::sin(pi * y); }, pb.disc.spaces())
        .coefficients;
}

DilationHistory varying_history(const BiotProblem& pb) {
    DilationHistory z;
    for (int n = 1; n <= pb.num_steps(); ++n) {
        const double t = pb.time(n);
        z.push_back(interpolate([t](double x, double y) { return 0.4 * std::sin(2 * pi * x + t) * std::cos(pi * y); },
                                pb.disc.spaces())
                        .coefficients);
    }
    return z;
}

double energy(const BiotProblem& pb, const Field& u) {
    const Vector uf = restrict_displacement(pb.disc.spaces(), u.coefficients);
    return uf.dot(pb.disc.elasticity() * uf);
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int cli(std::vector<std::string> args, std::string* err = nullptr) {
    args.insert(args.begin(), "biotlab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, e;
    const int code = biotlab::run_cli(static_cast<int>(argv.size()), argv.data(), out, e);
    if (err) *err = e.str();
    return code;
}

std::string shipped(const char* name) { return std::string(BIOT_CONFIG_DIR) + "/" + name; }

RunConfig load(const char* name) { return parse_config(read_text(shipped(name))); }

const PermeabilityModel carman_kozeny = PermeabilityModel::carman_kozeny(100.0, 1.0, 100.0);
const PermeabilityModel quadratic = PermeabilityModel::quadratic(1.0, 2.0, 4.0, 0.1, 10.0);
const PermeabilityModel unit_k = PermeabilityModel::constant(1.0, 1e-3, 1e3);

// ---------------------------------------------------------------------------

std::map<BcLayout, OperatorAudit> audits;

const OperatorAudit& audit_for(BcLayout layout) {
    auto it = audits.find(layout);
    if (it == audits.end()) it = audits.emplace(layout, operator_audit({4, 8, 16}, layout)).first;
    return it->second;
}

Outcome kernel() {
    Outcome o;
    for (auto layout : all_layouts) {
        for (const auto& r : audit_for(layout).rows) {
            const std::string tag = std::string(to_string(layout)) + " n=" + std::to_string(r.n);
            o.require(r.zero_multiplicity == 1, tag + " zero multiplicity " + std::to_string(r.zero_multiplicity));
            o.require(r.kernel_residual <= 1e-10, tag + " |B1| " + sci(r.kernel_residual));
        }
    }
    return o;
}

Outcome symmetry() {
    Outcome o;
    double worst_sym = 0.0, worst_min = 0.0;
    for (auto layout : all_layouts) {
        for (const auto& r : audit_for(layout).rows) {
            worst_sym = std::max(worst_sym, r.self_adjointness);
            worst_min = std::min(worst_min, r.theta_min);
        }
    }
    o.require(worst_sym <= 1e-10, "symmetry residual " + sci(worst_sym));
    o.require(worst_min >= -1e-11, "min eigenvalue " + sci(worst_min));
    o.note("max symmetry residual " + sci(worst_sym) + ", min eigenvalue " + sci(worst_min));
    return o;
}

Outcome isomorphism() {
    Outcome o;
    const auto& rows = audit_for(BcLayout::AllNeumann).rows;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        o.require(rows[i].drift < 0.25, "drift n=" + std::to_string(rows[i].n) + " " + sci(rows[i].drift));
    }
    o.note("theta_min_nonzero " + sci(rows[0].theta_min_nonzero) + " -> " + sci(rows[1].theta_min_nonzero) + " -> " +
           sci(rows[2].theta_min_nonzero));
    return o;
}

Outcome reduced_equivalence() {
    Outcome o;
    double worst = 0.0;
    for (auto layout : all_layouts) {
        const TriMesh mesh = build_unit_square_mesh(8, layout);
        const BiotProblem constant = make_problem(mesh, unit_k, {}, "smooth-forcing", 0.05, 0.5);
        const BiotProblem varying = make_problem(mesh, quadratic, {}, "smooth-forcing", 0.05, 0.5);
        const double a = oracle_compare(constant, constant_history(constant, zeros(constant))).relative_l2l2;
        const double b = oracle_compare(varying, varying_history(varying)).relative_l2l2;
        o.require(a <= 1e-8, std::string(to_string(layout)) + " constant k " + sci(a));
        o.require(b <= 1e-8, std::string(to_string(layout)) + " varying k " + sci(b));
        worst = std::max({worst, a, b});
    }
    o.note("max discrepancy " + sci(worst));
    return o;
}

Outcome energy_inequality() {
    Outcome o;
    double min_margin = std::numeric_limits<double>::infinity();
    int audited = 0;
    const auto check = [&](const std::string& tag, const Trajectory& t, const BiotProblem& pb) {
        const EnergyLedger e = energy_audit(t, pb);
        o.require(e.inequality_holds, tag + " bound violated");
        for (const auto& r : e.rows) min_margin = std::min(min_margin, r.margin / std::max(r.rhs, 1e-300));
        ++audited;
    };
    for (auto layout : all_layouts) {
        const TriMesh mesh = build_unit_square_mesh(8, layout);
        const std::string lt(to_string(layout));
        for (const char* name : {"smooth-forcing", "relaxation"}) {
            const BiotProblem lin = make_problem(mesh, unit_k, {}, name, 0.05, 0.5);
            check(lt + " linear constant " + name, solve_linear_biot(lin, constant_history(lin, zeros(lin))), lin);
        }
        const BiotProblem var = make_problem(mesh, quadratic, {}, "smooth-forcing", 0.05, 0.5);
        check(lt + " linear varying", solve_linear_biot(var, varying_history(var)), var);
        for (const auto& [tag, perm] : {std::pair{"carman-kozeny", carman_kozeny}, std::pair{"quadratic", quadratic}}) {
            const BiotProblem pb = make_problem(mesh, perm, {}, "smooth-forcing", 0.05, 0.5);
            const PicardResult r = picard_solve(pb, zeros(pb), 1e-8, 50, PicardMode::Global);
            o.require(r.report.converged, lt + " " + tag + " Picard did not converge");
            check(lt + " nonlinear " + tag, r.trajectory, pb);
        }
    }
    o.note(std::to_string(audited) + " ledgers, min relative margin " + sci(min_margin));
    return o;
}

Outcome dissipativity() {
    Outcome o;
    std::mt19937 gen(2024);
    std::normal_distribution<double> nd;
    for (auto layout : all_layouts) {
        BiotProblem pb = make_problem(build_unit_square_mesh(8, layout), unit_k, {}, "zero", 0.02, 1.0);
        Vector d0(pb.disc.spaces().num_pressure_dofs);
        for (auto& v : d0) v = nd(gen);
        pb.d0 = zero_mean_project(Field::pressure(d0), pb.disc.mesh());
        const Trajectory t = solve_linear_biot(pb, constant_history(pb, zeros(pb)));
        o.require(t.steps.size() == 50u, "expected 50 steps");
        double prev = energy(pb, t.steps.front().u);
        o.require(prev > 0.0, std::string(to_string(layout)) + " trivial initial energy");
        for (std::size_t n = 1; n < t.steps.size(); ++n) {
            const double e = energy(pb, t.steps[n].u);
            o.require(e <= prev, std::string(to_string(layout)) + " energy increased at step " + std::to_string(n + 1));
            prev = e;
        }
    }
    return o;
}

Outcome mms() {
    Outcome o;
    const RatesTable t = mms_convergence("mms1", {4, 8, 16}, DtRule::DtProportionalH2);
    const auto& last = t.rows.back();
    o.require(last.order_u >= 1.8, "u H1 order " + sci(last.order_u));
    o.require(last.order_p >= 1.8, "p L2 order " + sci(last.order_p));
    MmsSettings cfg;
    cfg.T = 1.0;
    const auto rows = mms_temporal("mms1_oscillating", 16, {0.1, 0.05, 0.025}, cfg);
    for (std::size_t i = 1; i < rows.size(); ++i) o.require(rows[i].order >= 0.9, "temporal order " + sci(rows[i].order));
    o.note("spatial orders u " + sci(last.order_u) + ", p " + sci(last.order_p) + "; temporal " + sci(rows[1].order) +
           ", " + sci(rows[2].order));
    return o;
}

Outcome nonlinear_fixed_point() {
    Outcome o;
    const RunConfig cfg = load("carman_kozeny.cfg");
    o.require(cfg.perm.kind == PermeabilityModel::Kind::CarmanKozeny && cfg.mesh_n == 8 && cfg.dt == 0.05 &&
                  cfg.T == 0.5 && cfg.picard_tol == 1e-8 && cfg.picard_mode == PicardMode::Global,
              "shipped configuration differs from the criterion");
    const BiotProblem pb = make_problem(cfg);
    const PicardResult r = picard_solve(pb, initial_guess(cfg, pb), cfg.picard_tol, 50, PicardMode::Global);
    o.require(r.report.converged, "not converged in 50 iterations");
    const WeakFormResidual w = weak_form_residual(pb, r.trajectory, PermeabilityArgument::Dilation);
    o.require(w.momentum <= 1e-9, "momentum residual " + sci(w.momentum));
    o.require(w.mass <= 1e-9, "mass residual with k(zeta) " + sci(w.mass));
    o.require(energy_audit(r.trajectory, pb).inequality_holds, "energy bound violated");
    o.note(std::to_string(r.report.iterations) + " iterations, last residual " + sci(r.report.residuals.back()) +
           ", weak-form residual momentum " + sci(w.momentum) + " mass " + sci(w.mass));
    return o;
}

Outcome constant_picard() {
    Outcome o;
    const BiotProblem pb =
        make_problem(build_unit_square_mesh(8, BcLayout::AllDirichlet), unit_k, {}, "smooth-forcing", 0.05, 0.5);
    std::mt19937 gen(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector random(pb.disc.spaces().num_pressure_dofs);
    for (auto& v : random) v = u(gen);
    for (const auto& [tag, z0] : {std::pair{"zero", zeros(pb)}, std::pair{"bump", bump(pb)}, std::pair{"random", random}}) {
        const PicardResult r = picard_solve(pb, z0, 1e-8, 50, PicardMode::Global);
        o.require(r.report.residuals.size() == 2u && r.report.residuals[1] == 0.0,
                  std::string(tag) + ": residual at iteration 2 is not exactly zero");
    }
    return o;
}

Outcome neumann_compatibility() {
    Outcome o;
    double worst = 0.0;
    for (const auto& perm : {unit_k, carman_kozeny, quadratic}) {
        const BiotProblem pb =
            make_problem(build_unit_square_mesh(8, BcLayout::AllNeumann), perm, {}, "smooth-forcing", 0.05, 0.5);
        const PicardResult r = picard_solve(pb, zeros(pb), 1e-8, 50, PicardMode::Global);
        const CompatibilityRecord rec = compatibility_check(r.trajectory, pb);
        o.require(!rec.source_mean_corrected, "zero-mean source was corrected");
        worst = std::max(worst, rec.max_drift);
    }
    o.require(worst <= 1e-10, "mean drift " + sci(worst));
    const fs::path dir = fs::temp_directory_path() / "biotlab_acceptance_strict";
    std::string err;
    const int code = cli({"run", "--config", shipped("neumann_strict.cfg"), "--out", dir.string()}, &err);
    fs::remove_all(dir);
    o.require(code == 2, "strict incompatible source exit code " + std::to_string(code));
    o.note("max mean drift " + sci(worst) + ", strict exit " + std::to_string(code));
    return o;
}

Outcome determinism() {
    Outcome o;
    const fs::path dir = fs::temp_directory_path() / "biotlab_acceptance_determinism";
    fs::remove_all(dir);
    std::map<std::string, std::string> first;
    o.require(cli({"run", "--config", shipped("carman_kozeny.cfg"), "--out", dir.string()}) == 0, "first run failed");
    for (const auto& e : fs::directory_iterator(dir)) first[e.path().filename().string()] = read_text(e.path());
    o.require(cli({"run", "--config", shipped("carman_kozeny.cfg"), "--out", dir.string()}) == 0, "second run failed");
    std::size_t compared = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        const auto it = first.find(name);
        o.require(it != first.end(), name + " only in second run");
        if (it != first.end()) {
            o.require(it->second == read_text(e.path()), name + " differs");
            ++compared;
        }
    }
    o.require(compared == first.size() && compared > 0, "file sets differ");
    fs::remove_all(dir);
    o.note(std::to_string(compared) + " files identical");
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"operator kernel is the constants", kernel},
        {"B is self-adjoint and monotone", symmetry},
        {"smallest nonzero eigenvalue is mesh stable", isomorphism},
        {"reduced and monolithic solves agree", reduced_equivalence},
        {"energy inequality holds on every case", energy_inequality},
        {"elastic energy decays without data", dissipativity},
        {"manufactured-solution orders", mms},
        {"Carman-Kozeny fixed point", nonlinear_fixed_point},
        {"constant permeability Picard is exact at iteration 2", constant_picard},
        {"Neumann compatibility", neumann_compatibility},
        {"bit-identical repeated runs", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failures;
        std::printf("[%s] %zu %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
