/**
 * @file config.hpp
 * @brief Flat `key = value` run configuration.
 *
 * One entry per line, `#` starts a comment. Unknown keys, duplicates,
 * malformed values and constraint violations are rejected with the line
 * number. Required keys: mesh.n, mesh.bc, case, time.dt, time.T.
 */
#pragma once

#include "biot/io.hpp"
#include "biot/problem.hpp"
#include "biot/solver.hpp"

#include <charconv>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

namespace biot {

enum class InitialGuess { Zero, Bump };

struct RunConfig {
    int mesh_n = 0;
    BcLayout layout = BcLayout::AllDirichlet;
    Physics physics{};
    PermeabilityModel perm{};
    std::string case_name;
    double dt = 0.0;
    double T = 0.0;
    PicardMode picard_mode = PicardMode::Global;
    double picard_tol = 1e-8;
    int picard_max_iter = 50;
    InitialGuess picard_z0 = InitialGuess::Zero;
    IncompatibleSourcePolicy policy = IncompatibleSourcePolicy::Correct;
    std::string out_dir = "out";

    /// Every key with its effective value, in a fixed order.
    [[nodiscard]] io::KeyValues resolved() const;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] inline void config_fail(int line, const std::string& msg) {
    throw ConfigError(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg);
}

inline double parse_real(const std::string& v, int line, const std::string& key) {
    double out = 0.0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end || !std::isfinite(out)) config_fail(line, "malformed real for '" + key + "': '" + v + "'");
    return out;
}

inline int parse_int(const std::string& v, int line, const std::string& key) {
    int out = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) config_fail(line, "malformed integer for '" + key + "': '" + v + "'");
    return out;
}

inline std::string picard_mode_name(PicardMode m) { return m == PicardMode::Global ? "global" : "per_step"; }

}  // namespace detail

inline io::KeyValues RunConfig::resolved() const {
    using io::fmt;
    io::KeyValues kv = {
        {"mesh.n", std::to_string(mesh_n)},
        {"mesh.bc", std::string(to_string(layout))},
        {"physics.lambda", fmt(physics.lambda)},
        {"physics.mu", fmt(physics.mu)},
        {"physics.c0", fmt(physics.c0)},
        {"physics.alpha", fmt(physics.alpha)},
        {"perm.model", std::string(to_string(perm.kind))},
    };
    // Only the coefficients of the selected law, so the block parses back.
    switch (perm.kind) {
    case PermeabilityModel::Kind::Constant: kv.emplace_back("perm.k0", fmt(perm.k0)); break;
    case PermeabilityModel::Kind::CarmanKozeny: kv.emplace_back("perm.scale", fmt(perm.scale)); break;
    case PermeabilityModel::Kind::Quadratic:
        kv.emplace_back("perm.a", fmt(perm.a));
        kv.emplace_back("perm.b", fmt(perm.b));
        kv.emplace_back("perm.c", fmt(perm.c));
        break;
    }
    const io::KeyValues rest = {
        {"perm.k1", fmt(perm.k1)},
        {"perm.k2", fmt(perm.k2)},
        {"case", case_name},
        {"time.dt", fmt(dt)},
        {"time.T", fmt(T)},
        {"picard.mode", detail::picard_mode_name(picard_mode)},
        {"picard.tol", fmt(picard_tol)},
        {"picard.max_iter", std::to_string(picard_max_iter)},
        {"picard.z0", picard_z0 == InitialGuess::Zero ? "zero" : "bump"},
        {"neumann.incompatible", policy == IncompatibleSourcePolicy::Correct ? "correct" : "strict"},
        {"out.dir", out_dir},
    };
    kv.insert(kv.end(), rest.begin(), rest.end());
    return kv;
}

inline RunConfig parse_config(std::string_view text) {
    struct Entry {
        std::string value;
        int line;
    };
    std::map<std::string, Entry> entries;
    static const std::vector<std::string> known = {
        "mesh.n", "mesh.bc", "physics.lambda", "physics.mu", "physics.c0", "physics.alpha", "perm.model", "perm.k0",
        "perm.scale", "perm.a", "perm.b", "perm.c", "perm.k1", "perm.k2", "case", "time.dt", "time.T", "picard.mode",
        "picard.tol", "picard.max_iter", "picard.z0", "neumann.incompatible", "out.dir"};

    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) detail::config_fail(lineno, "expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) detail::config_fail(lineno, "missing key");
        if (value.empty()) detail::config_fail(lineno, "missing value for '" + key + "'");
        if (std::find(known.begin(), known.end(), key) == known.end()) detail::config_fail(lineno, "unknown key '" + key + "'");
        if (entries.count(key)) {
            detail::config_fail(lineno, "duplicate key '" + key + "' (first set on line " +
                                            std::to_string(entries[key].line) + ")");
        }
        entries[key] = {value, lineno};
    }

    for (const char* req : {"mesh.n", "mesh.bc", "case", "time.dt", "time.T"}) {
        if (!entries.count(req)) throw ConfigError(std::string("missing required key '") + req + "'");
    }

    const auto line_of = [&](const std::string& key) { return entries.count(key) ? entries[key].line : 0; };
    const auto real = [&](const std::string& key, double fallback) {
        const auto it = entries.find(key);
        return it == entries.end() ? fallback : detail::parse_real(it->second.value, it->second.line, key);
    };
    const auto integer = [&](const std::string& key, int fallback) {
        const auto it = entries.find(key);
        return it == entries.end() ? fallback : detail::parse_int(it->second.value, it->second.line, key);
    };
    const auto choice = [&](const std::string& key, const std::string& fallback,
                            std::initializer_list<std::string_view> allowed) {
        const auto it = entries.find(key);
        const std::string v = it == entries.end() ? fallback : it->second.value;
        if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
            detail::config_fail(line_of(key), "invalid value '" + v + "' for '" + key + "'");
        }
        return v;
    };
    const auto require = [&](bool ok, const std::string& key, const std::string& msg) {
        if (!ok) detail::config_fail(line_of(key), "'" + key + "' " + msg);
    };

    RunConfig c;
    c.mesh_n = integer("mesh.n", 0);
    require(c.mesh_n >= 1, "mesh.n", "must be >= 1");
    c.layout = parse_layout(choice("mesh.bc", "dirichlet", {"dirichlet", "neumann", "mixed_left"}));

    c.physics.lambda = real("physics.lambda", 1.0);
    c.physics.mu = real("physics.mu", 1.0);
    c.physics.c0 = real("physics.c0", 0.0);
    c.physics.alpha = real("physics.alpha", 1.0);
    require(c.physics.lambda >= 0.0, "physics.lambda", "must be >= 0");
    require(c.physics.mu > 0.0, "physics.mu", "must be > 0");
    require(c.physics.c0 >= 0.0, "physics.c0", "must be >= 0");
    require(c.physics.alpha > 0.0, "physics.alpha", "must be > 0");

    const std::string model = choice("perm.model", "constant", {"constant", "carman_kozeny", "quadratic"});
    const double k1 = real("perm.k1", 1e-3);
    const double k2 = real("perm.k2", 1e3);
    require(k1 > 0.0, "perm.k1", "must be > 0");
    require(k2 >= k1, "perm.k2", "must be >= perm.k1");
    const auto only_for = [&](const char* key, const std::string& owner) {
        if (entries.count(key) && model != owner) {
            detail::config_fail(line_of(key), std::string("'") + key + "' does not apply to perm.model = " + model);
        }
    };
    only_for("perm.k0", "constant");
    only_for("perm.scale", "carman_kozeny");
    only_for("perm.a", "quadratic");
    only_for("perm.b", "quadratic");
    only_for("perm.c", "quadratic");
    if (model == "constant") {
        const double k0 = real("perm.k0", 1.0);
        require(k0 > 0.0, "perm.k0", "must be > 0");
        c.perm = PermeabilityModel::constant(k0, k1, k2);
    } else if (model == "carman_kozeny") {
        const double scale = real("perm.scale", 1.0);
        require(scale > 0.0, "perm.scale", "must be > 0");
        c.perm = PermeabilityModel::carman_kozeny(scale, k1, k2);
    } else {
        c.perm = PermeabilityModel::quadratic(real("perm.a", 1.0), real("perm.b", 0.0), real("perm.c", 0.0), k1, k2);
    }

    c.case_name = entries["case"].value;
    {
        const auto names = source_case_names();
        require(std::find(names.begin(), names.end(), c.case_name) != names.end(), "case",
                "names an unknown source case '" + c.case_name + "'");
    }

    c.dt = real("time.dt", 0.0);
    c.T = real("time.T", 0.0);
    require(c.dt > 0.0, "time.dt", "must be > 0");
    require(c.T > 0.0, "time.T", "must be > 0");
    require(c.dt <= c.T * (1.0 + 1e-12), "time.dt", "must not exceed time.T");
    require(std::abs(std::lround(c.T / c.dt) * c.dt - c.T) <= 1e-9 * c.T, "time.dt", "must divide time.T");

    c.picard_mode = choice("picard.mode", "global", {"global", "per_step"}) == "global" ? PicardMode::Global
                                                                                       : PicardMode::PerStep;
    c.picard_tol = real("picard.tol", 1e-8);
    require(c.picard_tol > 0.0, "picard.tol", "must be > 0");
    c.picard_max_iter = integer("picard.max_iter", 50);
    require(c.picard_max_iter >= 1, "picard.max_iter", "must be >= 1");
    c.picard_z0 = choice("picard.z0", "zero", {"zero", "bump"}) == "zero" ? InitialGuess::Zero : InitialGuess::Bump;
    c.policy = choice("neumann.incompatible", "correct", {"correct", "strict"}) == "correct"
                   ? IncompatibleSourcePolicy::Correct
                   : IncompatibleSourcePolicy::Strict;
    if (entries.count("out.dir")) c.out_dir = entries["out.dir"].value;
    return c;
}

inline BiotProblem make_problem(const RunConfig& c) {
    return make_problem(build_unit_square_mesh(c.mesh_n, c.layout), c.perm, c.physics, c.case_name, c.dt, c.T,
                        c.policy);
}

/// z0 for Picard: zero, or the interpolant of 0.1 sin(pi x) sin(pi y).
inline Vector initial_guess(const RunConfig& c, const BiotProblem& pb) {
    if (c.picard_z0 == InitialGuess::Zero) return Vector::Zero(pb.disc.spaces().num_pressure_dofs);
    constexpr double pi = std::numbers::pi;
    return interpolate([](double x, double y) { return 0.1 * std::sin(pi * x) * std::sin(pi * y); }, pb.disc.spaces())
        .coefficients;
}

}  // namespace biot
