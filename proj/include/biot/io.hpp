/**
 * @file io.hpp
 * @brief Bit-stable text output: CSV reports, trajectory files and legacy VTK snapshots.
 *
 * Every real number is printed with 17 significant digits so files round-trip
 * exactly. Report files open with a `#` comment block naming the program
 * version and the resolved run configuration.
 */
#pragma once

#include "biot/diagnostics.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#ifndef BIOT_VERSION
#define BIOT_VERSION "0.1.0"
#endif

namespace biot::io {

inline constexpr const char* program_name = "biotlab";

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// `# biotlab <version>`, `# file: <kind>`, then one `# key = value` line per entry.
inline void write_header(std::ostream& os, std::string_view kind, const KeyValues& config) {
    os << "# " << program_name << ' ' << BIOT_VERSION << '\n';
    os << "# file: " << kind << '\n';
    for (const auto& [k, v] : config) os << "# " << k << " = " << v << '\n';
}

inline void write_energy_csv(std::ostream& os, const EnergyLedger& ledger, const KeyValues& config) {
    write_header(os, "energy", config);
    os << "# bound: " << ledger.bound_variant << '\n';
    os << "step,time,u_energy,dissipation_cum,lhs,rhs,margin\n";
    for (const auto& r : ledger.rows) {
        os << r.step << ',' << fmt(r.time) << ',' << fmt(r.u_energy) << ',' << fmt(r.dissipation_cum) << ','
           << fmt(r.lhs) << ',' << fmt(r.rhs) << ',' << fmt(r.margin) << '\n';
    }
}

inline void write_rates_csv(std::ostream& os, const RatesTable& table, const KeyValues& config) {
    write_header(os, "rates", config);
    os << "level,n,h,err_u_h1,err_p_l2,err_p_h1semi,order_u,order_p\n";
    for (const auto& r : table.rows) {
        os << r.level << ',' << r.n << ',' << fmt(r.h) << ',' << fmt(r.errors.u_h1) << ',' << fmt(r.errors.p_l2)
           << ',' << fmt(r.errors.p_h1semi) << ',' << fmt(r.order_u) << ',' << fmt(r.order_p) << '\n';
    }
}

inline void write_temporal_csv(std::ostream& os, const std::vector<TemporalRow>& rows, const KeyValues& config) {
    write_header(os, "temporal", config);
    os << "dt,err_p_l2l2,order\n";
    for (const auto& r : rows) os << fmt(r.dt) << ',' << fmt(r.p_l2l2) << ',' << fmt(r.order) << '\n';
}

inline void write_picard_csv(std::ostream& os, const PicardReport& report, const KeyValues& config) {
    write_header(os, "picard", config);
    os << "# converged: " << (report.converged ? "true" : "false") << '\n';
    os << "iteration,residual\n";
    for (std::size_t i = 0; i < report.residuals.size(); ++i) os << i + 1 << ',' << fmt(report.residuals[i]) << '\n';
}

inline void write_operator_csv(std::ostream& os, const OperatorAudit& audit, const KeyValues& config) {
    write_header(os, "operators", config);
    os << "n,pressure_dofs,zero_multiplicity,theta_min,theta_min_nonzero,theta_max,selfadjoint_residual,"
          "kernel_residual,drift\n";
    for (const auto& r : audit.rows) {
        os << r.n << ',' << r.pressure_dofs << ',' << r.zero_multiplicity << ',' << fmt(r.theta_min) << ','
           << fmt(r.theta_min_nonzero) << ',' << fmt(r.theta_max) << ',' << fmt(r.self_adjointness) << ','
           << fmt(r.kernel_residual) << ',' << fmt(r.drift) << '\n';
    }
}

inline void write_compare_csv(std::ostream& os, const OracleDiscrepancy& d, double dt, const KeyValues& config) {
    write_header(os, "compare", config);
    os << "# relative_l2l2: " << fmt(d.relative_l2l2) << '\n';
    os << "step,time,max_abs_diff\n";
    for (std::size_t i = 0; i < d.step_max_abs.size(); ++i) {
        os << i + 1 << ',' << fmt(dt * static_cast<double>(i + 1)) << ',' << fmt(d.step_max_abs[i]) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Trajectory files
// ---------------------------------------------------------------------------
//
// Data lines: record,step,time,multiplier,v0,v1,...   with record in {d0,u,p,zeta,z}.

inline void write_vector_record(std::ostream& os, std::string_view record, int step, double time, double mult,
                                const Vector& v) {
    os << record << ',' << step << ',' << fmt(time) << ',' << fmt(mult);
    for (int i = 0; i < v.size(); ++i) os << ',' << fmt(v[i]);
    os << '\n';
}

inline void write_trajectory(std::ostream& os, const Trajectory& traj, const KeyValues& config) {
    write_header(os, "trajectory", config);
    os << "# dt: " << fmt(traj.dt) << '\n';
    os << "# source_mean_corrected: " << (traj.source_mean_corrected ? "true" : "false") << '\n';
    os << "record,step,time,multiplier,values\n";
    write_vector_record(os, "d0", 0, 0.0, 0.0, traj.d0.coefficients);
    for (std::size_t n = 0; n < traj.steps.size(); ++n) {
        const auto& st = traj.steps[n];
        const int step = static_cast<int>(n) + 1;
        write_vector_record(os, "u", step, st.time, st.multiplier, st.u.coefficients);
        write_vector_record(os, "p", step, st.time, st.multiplier, st.p.coefficients);
        write_vector_record(os, "zeta", step, st.time, st.multiplier, st.zeta.coefficients);
        write_vector_record(os, "z", step, st.time, st.multiplier, st.z.coefficients);
    }
}

/// Exact inverse of fmt, including subnormals, inf and nan.
inline double parse_double(const std::string& s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw std::runtime_error("trajectory file: bad number '" + s + "'");
    return v;
}

struct TrajectoryFile {
    std::string config_text;  // header `key = value` lines, ready for parse_config
    Trajectory trajectory;
};

inline TrajectoryFile read_trajectory(std::istream& is) {
    TrajectoryFile out;
    std::string line;
    bool saw_columns = false;
    auto& traj = out.trajectory;
    const auto split = [](const std::string& s) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) parts.push_back(item);
        return parts;
    };
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line.rfind("# ", 0) == 0) {
            const std::string body = line.substr(2);
            if (body.rfind("dt: ", 0) == 0) {
                traj.dt = parse_double(body.substr(4));
            } else if (body.rfind("source_mean_corrected: ", 0) == 0) {
                traj.source_mean_corrected = body.substr(23) == "true";
            } else if (body.find(" = ") != std::string::npos) {
                out.config_text += body + '\n';
            }
            continue;
        }
        if (line.rfind("record,", 0) == 0) {
            saw_columns = true;
            continue;
        }
        if (!saw_columns) throw std::runtime_error("trajectory file: data before the column line");
        const auto parts = split(line);
        if (parts.size() < 4) throw std::runtime_error("trajectory file: short record");
        Vector v(static_cast<int>(parts.size()) - 4);
        for (int i = 0; i < v.size(); ++i) v[i] = parse_double(parts[4 + i]);
        const std::string& rec = parts[0];
        const int step = std::stoi(parts[1]);
        if (rec == "d0") {
            traj.d0 = Field::pressure(std::move(v));
            continue;
        }
        if (step < 1) throw std::runtime_error("trajectory file: bad step index");
        if (static_cast<int>(traj.steps.size()) < step) {
            traj.steps.resize(step);
        }
        auto& st = traj.steps[step - 1];
        st.time = parse_double(parts[2]);
        st.multiplier = parse_double(parts[3]);
        if (rec == "u") st.u = Field::displacement(std::move(v));
        else if (rec == "p") st.p = Field::pressure(std::move(v));
        else if (rec == "zeta") st.zeta = Field::pressure(std::move(v));
        else if (rec == "z") st.z = Field::pressure(std::move(v));
        else throw std::runtime_error("trajectory file: unknown record '" + rec + "'");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Legacy ASCII VTK
// ---------------------------------------------------------------------------

/// Vertex values of u (third component zero), p, zeta and k(z).
inline void write_vtk(std::ostream& os, const TriMesh& mesh, const TrajectoryStep& st, const PermeabilityModel& perm,
                      int step) {
    const auto nv = static_cast<int>(mesh.num_vertices());
    const auto nt = static_cast<int>(mesh.num_triangles());
    const int nq = static_cast<int>(st.u.coefficients.size() / 2);
    os << "# vtk DataFile Version 3.0\n";
    os << program_name << ' ' << BIOT_VERSION << " step " << step << " time " << fmt(st.time) << '\n';
    os << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << nv << " double\n";
    for (const auto& v : mesh.vertices) os << fmt(v.x) << ' ' << fmt(v.y) << " 0\n";
    os << "CELLS " << nt << ' ' << 4 * nt << '\n';
    for (const auto& t : mesh.triangles) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    os << "CELL_TYPES " << nt << '\n';
    for (int i = 0; i < nt; ++i) os << "5\n";
    os << "POINT_DATA " << nv << '\n';
    os << "VECTORS u double\n";
    for (int v = 0; v < nv; ++v) os << fmt(st.u.coefficients[v]) << ' ' << fmt(st.u.coefficients[nq + v]) << " 0\n";
    const auto scalars = [&](std::string_view name, auto&& value) {
        os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (int v = 0; v < nv; ++v) os << fmt(value(v)) << '\n';
    };
    scalars("p", [&](int v) { return st.p.coefficients[v]; });
    scalars("zeta", [&](int v) { return st.zeta.coefficients[v]; });
    scalars("perm", [&](int v) { return perm(st.z.coefficients[v]); });
}

}  // namespace biot::io
