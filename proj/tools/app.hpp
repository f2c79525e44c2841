// biotlab command-line front end. Kept in a header so tests can drive it in-process.
#pragma once

#include "biot/biot.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace biotlab {

namespace fs = std::filesystem;

enum ExitCode : int { Ok = 0, Failure = 1, BadConfig = 2, NonConvergence = 3, Violation = 4 };

/// Thrown to leave a subcommand with a specific exit code and error record.
struct ExitError : std::runtime_error {
    ExitError(int code, std::string kind, const std::string& msg, nlohmann::json extra = nlohmann::json::object())
        : std::runtime_error(msg), code(code), kind(std::move(kind)), extra(std::move(extra)) {}
    int code;
    std::string kind;
    nlohmann::json extra;
};

inline void error_record(std::ostream& err, int code, std::string_view kind, std::string_view msg,
                         const nlohmann::json& extra = nlohmann::json::object()) {
    nlohmann::json rec = {{"error", kind}, {"message", msg}, {"exit_code", code}};
    for (const auto& [k, v] : extra.items()) rec[k] = v;
    err << rec.dump() << '\n';
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw biot::ConfigError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::ofstream open_output(const fs::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
    return os;
}

inline fs::path prepare_dir(const std::string& dir) {
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

inline std::vector<int> parse_levels(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(item, &used);
            if (used != item.size() || v < 1) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw biot::ConfigError("malformed level list '" + text + "'");
        }
    }
    if (out.empty()) throw biot::ConfigError("empty level list");
    return out;
}

/// Resolved configuration for data-file headers; the output location is left out so files do not depend on it.
inline biot::io::KeyValues header_config(const biot::RunConfig& cfg) {
    auto kv = cfg.resolved();
    std::erase_if(kv, [](const auto& e) { return e.first == "out.dir"; });
    return kv;
}

inline void write_run_config(const fs::path& path, const biot::io::KeyValues& kv) {
    auto os = open_output(path);
    biot::io::write_header(os, "run_config", {});
    for (const auto& [k, v] : kv) os << k << " = " << v << '\n';
}

// ---------------------------------------------------------------------------

inline int cmd_run(const std::string& config_path, const std::string& out_override, std::ostream& out) {
    biot::RunConfig cfg = biot::parse_config(read_file(config_path));
    if (!out_override.empty()) cfg.out_dir = out_override;
    const auto kv = header_config(cfg);
    const biot::BiotProblem pb = biot::make_problem(cfg);

    out << "run: case " << cfg.case_name << ", n = " << cfg.mesh_n << ", bc = " << biot::to_string(cfg.layout)
        << ", perm = " << biot::to_string(cfg.perm.kind) << ", steps = " << pb.num_steps() << '\n';
    const biot::PicardResult res =
        biot::picard_solve(pb, biot::initial_guess(cfg, pb), cfg.picard_tol, cfg.picard_max_iter, cfg.picard_mode);
    const auto& traj = res.trajectory;
    if (traj.source_mean_corrected) {
        out << "warning: source integral is nonzero on the pure Neumann layout; its mean was removed\n";
    }
    const biot::EnergyLedger ledger = biot::energy_audit(traj, pb);

    const fs::path dir = prepare_dir(cfg.out_dir);
    {
        auto os = open_output(dir / "trajectory.csv");
        biot::io::write_trajectory(os, traj, kv);
    }
    {
        auto os = open_output(dir / "energy.csv");
        biot::io::write_energy_csv(os, ledger, kv);
    }
    {
        auto os = open_output(dir / "picard.csv");
        biot::io::write_picard_csv(os, res.report, kv);
    }
    for (std::size_t n = 0; n < traj.steps.size(); ++n) {
        char name[32];
        std::snprintf(name, sizeof name, "snapshot_%04zu.vtk", n + 1);
        auto os = open_output(dir / name);
        biot::io::write_vtk(os, pb.disc.mesh(), traj.steps[n], pb.perm, static_cast<int>(n) + 1);
    }
    write_run_config(dir / "run_config.txt", cfg.resolved());
    out << "picard: " << res.report.iterations << " iteration(s), last residual "
        << biot::io::fmt(res.report.residuals.back()) << (res.report.converged ? ", converged" : ", not converged")
        << '\n';
    out << "energy: final margin " << biot::io::fmt(ledger.rows.empty() ? 0.0 : ledger.rows.back().margin)
        << (ledger.inequality_holds ? ", bound holds" : ", bound VIOLATED") << '\n';
    out << "wrote " << dir.string() << '\n';

    if (!res.report.converged) {
        throw ExitError(NonConvergence, "NonConvergence",
                        "Picard iteration did not converge within " + std::to_string(cfg.picard_max_iter) +
                            " iteration(s)",
                        {{"iterations", res.report.iterations}, {"last_residual", res.report.residuals.back()}});
    }
    if (!ledger.inequality_holds) throw ExitError(Violation, "EnergyInequality", "energy bound violated");
    if (cfg.layout == biot::BcLayout::AllNeumann) {
        const auto rec = biot::compatibility_check(traj, pb);
        if (rec.max_drift > 1e-10) {
            throw ExitError(Violation, "MeanDrift", "mean of p or zeta drifted on the Neumann layout",
                            {{"max_drift", rec.max_drift}});
        }
    }
    return Ok;
}

inline int cmd_mms(const std::string& case_name, const std::string& levels_text, const std::string& rule_name,
                   bool temporal, const std::string& out_dir, std::ostream& out) {
    const auto levels = parse_levels(levels_text);
    biot::MmsSettings cfg;
    const fs::path dir = prepare_dir(out_dir);
    if (temporal) {
        if (levels.size() != 1) throw biot::ConfigError("--temporal takes a single level");
        cfg.T = 1.0;
        const std::vector<double> dts = {0.1, 0.05, 0.025};
        const auto rows = biot::mms_temporal(case_name, levels.front(), dts, cfg);
        const biot::io::KeyValues kv = {{"case", case_name}, {"mesh.n", std::to_string(levels.front())},
                                        {"time.T", biot::io::fmt(cfg.T)}, {"perm.k0", biot::io::fmt(cfg.k0)}};
        auto os = open_output(dir / "temporal.csv");
        biot::io::write_temporal_csv(os, rows, kv);
        for (const auto& r : rows) {
            out << "dt " << biot::io::fmt(r.dt) << "  err_p " << biot::io::fmt(r.p_l2l2) << "  order "
                << biot::io::fmt(r.order) << '\n';
        }
        return Ok;
    }
    biot::DtRule rule;
    if (rule_name == "h2") rule = biot::DtRule::DtProportionalH2;
    else if (rule_name == "tiny") rule = biot::DtRule::DtFixedTiny;
    else throw biot::ConfigError("unknown --dt-rule '" + rule_name + "' (expected h2 or tiny)");
    const auto table = biot::mms_convergence(case_name, levels, rule, cfg);
    const biot::io::KeyValues kv = {{"case", case_name}, {"levels", levels_text}, {"dt_rule", rule_name},
                                    {"time.T", biot::io::fmt(cfg.T)}, {"perm.k0", biot::io::fmt(cfg.k0)}};
    auto os = open_output(dir / "rates.csv");
    biot::io::write_rates_csv(os, table, kv);
    for (const auto& r : table.rows) {
        out << "n " << r.n << "  err_u_h1 " << biot::io::fmt(r.errors.u_h1) << "  err_p_l2 "
            << biot::io::fmt(r.errors.p_l2) << "  order_u " << biot::io::fmt(r.order_u) << "  order_p "
            << biot::io::fmt(r.order_p) << '\n';
    }
    return Ok;
}

inline int cmd_operators(const std::string& levels_text, const std::string& bc, const std::string& out_dir,
                         std::ostream& out) {
    const auto levels = parse_levels(levels_text);
    biot::BcLayout layout;
    try {
        layout = biot::parse_layout(bc);
    } catch (const std::exception&) {
        throw biot::ConfigError("unknown --bc '" + bc + "'");
    }
    const auto audit = biot::operator_audit(levels, layout);
    const fs::path dir = prepare_dir(out_dir);
    {
        auto os = open_output(dir / "operators.csv");
        biot::io::write_operator_csv(os, audit, {{"levels", levels_text}, {"mesh.bc", bc}});
    }
    bool ok = true;
    for (const auto& r : audit.rows) {
        out << "n " << r.n << "  zero multiplicity " << r.zero_multiplicity << "  theta_min_nonzero "
            << biot::io::fmt(r.theta_min_nonzero) << "  theta_max " << biot::io::fmt(r.theta_max) << '\n';
        ok = ok && r.zero_multiplicity == 1 && r.self_adjointness <= 1e-10 && r.theta_min >= -1e-11;
    }
    if (!ok) throw ExitError(Violation, "OperatorAudit", "kernel, symmetry or monotonicity check failed");
    return Ok;
}

inline int cmd_audit(const std::string& traj_path, const std::string& config_path, const std::string& out_dir,
                     std::ostream& out) {
    std::ifstream in(traj_path, std::ios::binary);
    if (!in) throw biot::ConfigError("cannot open '" + traj_path + "'");
    biot::io::TrajectoryFile file;
    try {
        file = biot::io::read_trajectory(in);
    } catch (const biot::ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw biot::ConfigError(std::string("malformed trajectory: ") + e.what());
    }
    const std::string cfg_text = config_path.empty() ? file.config_text : read_file(config_path);
    const biot::RunConfig cfg = biot::parse_config(cfg_text);
    const biot::BiotProblem pb = biot::make_problem(cfg);
    biot::EnergyLedger ledger;
    try {
        ledger = biot::energy_audit(file.trajectory, pb);
    } catch (const std::invalid_argument& e) {
        throw biot::ConfigError(e.what());
    }
    const fs::path dir = prepare_dir(out_dir.empty() ? cfg.out_dir : out_dir);
    {
        auto os = open_output(dir / "audit_energy.csv");
        biot::io::write_energy_csv(os, ledger, header_config(cfg));
    }
    out << "audit: " << ledger.rows.size() << " step(s), "
        << (ledger.inequality_holds ? "bound holds" : "bound VIOLATED") << '\n';
    if (!ledger.inequality_holds) throw ExitError(Violation, "EnergyInequality", "energy bound violated");
    return Ok;
}

inline int cmd_compare(const std::string& config_path, const std::string& out_override, std::ostream& out) {
    biot::RunConfig cfg = biot::parse_config(read_file(config_path));
    if (!out_override.empty()) cfg.out_dir = out_override;
    const biot::BiotProblem pb = biot::make_problem(cfg);
    const auto z = biot::constant_history(pb, biot::initial_guess(cfg, pb));
    const auto d = biot::oracle_compare(pb, z);
    const fs::path dir = prepare_dir(cfg.out_dir);
    {
        auto os = open_output(dir / "compare.csv");
        biot::io::write_compare_csv(os, d, pb.dt, header_config(cfg));
    }
    out << "compare: relative L2(L2) pressure discrepancy " << biot::io::fmt(d.relative_l2l2) << '\n';
    if (d.relative_l2l2 > 1e-8) {
        throw ExitError(Violation, "OracleDiscrepancy", "reduced and monolithic solutions disagree",
                        {{"relative_l2l2", d.relative_l2l2}});
    }
    return Ok;
}

// ---------------------------------------------------------------------------

/// Parses argv, dispatches, maps failures to exit codes with one JSON line on `err`.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Finite-element lab for quasi-static nonlinear Biot poroelasticity", "biotlab"};
    app.set_version_flag("--version", std::string(BIOT_VERSION));
    app.require_subcommand(1);

    std::string config, out_dir, case_name = "mms1", levels = "4,8,16", rule = "h2", bc = "neumann", traj;
    bool temporal = false;

    auto* run = app.add_subcommand("run", "Solve a configured problem and write trajectory, ledger and snapshots");
    run->add_option("--config", config, "Configuration file")->required();
    run->add_option("--out", out_dir, "Output directory (overrides out.dir)");

    auto* mms = app.add_subcommand("mms", "Manufactured-solution convergence study");
    mms->add_option("--case", case_name, "Manufactured case")->capture_default_str();
    mms->add_option("--levels", levels, "Comma-separated mesh levels")->capture_default_str();
    mms->add_option("--dt-rule", rule, "h2 (dt ~ h^2) or tiny")->capture_default_str();
    mms->add_flag("--temporal", temporal, "Time-refinement study on the single given level");
    mms->add_option("--out", out_dir, "Output directory");

    auto* ops = app.add_subcommand("operators", "Spectral audit of the pressure-to-dilation operator");
    ops->add_option("--n", levels, "Comma-separated mesh levels")->capture_default_str();
    ops->add_option("--bc", bc, "dirichlet, neumann or mixed_left")->capture_default_str();
    ops->add_option("--out", out_dir, "Output directory");

    auto* audit = app.add_subcommand("audit", "Re-audit a stored trajectory");
    audit->add_option("--trajectory", traj, "Trajectory file")->required();
    audit->add_option("--config", config, "Configuration (default: the trajectory header)");
    audit->add_option("--out", out_dir, "Output directory");

    auto* cmp = app.add_subcommand("compare", "Reduced versus monolithic solve on frozen permeability");
    cmp->add_option("--config", config, "Configuration file")->required();
    cmp->add_option("--out", out_dir, "Output directory (overrides out.dir)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return Ok;
    } catch (const CLI::CallForVersion&) {
        out << BIOT_VERSION << '\n';
        return Ok;
    } catch (const CLI::ParseError& e) {
        error_record(err, BadConfig, "UsageError", e.what());
        return BadConfig;
    }

    try {
        if (*run) return cmd_run(config, out_dir, out);
        if (*mms) return cmd_mms(case_name, levels, rule, temporal, out_dir.empty() ? "out" : out_dir, out);
        if (*ops) return cmd_operators(levels, bc, out_dir.empty() ? "out" : out_dir, out);
        if (*audit) return cmd_audit(traj, config, out_dir, out);
        if (*cmp) return cmd_compare(config, out_dir, out);
    } catch (const ExitError& e) {
        error_record(err, e.code, e.kind, e.what(), e.extra);
        return e.code;
    } catch (const biot::IncompatibleSourceError& e) {
        error_record(err, BadConfig, "IncompatibleSource", e.what());
        return BadConfig;
    } catch (const biot::ConfigError& e) {
        error_record(err, BadConfig, "ConfigError", e.what());
        return BadConfig;
    } catch (const biot::CapExceededError& e) {
        error_record(err, BadConfig, "CapExceeded", e.what());
        return BadConfig;
    } catch (const biot::SolverError& e) {
        error_record(err, Failure, "SolverError", e.what());
        return Failure;
    } catch (const std::exception& e) {
        error_record(err, Failure, "Error", e.what());
        return Failure;
    }
    return Failure;
}

}  // namespace biotlab
