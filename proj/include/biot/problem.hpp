/**
 * @file problem.hpp
 * @brief Problem data: physics parameters, the named source registry, and BiotProblem.
 *
 * Manufactured cases carry closed-form sources derived by hand from
 *   F = -div sigma(u*) + alpha grad p*,
 *   S = d/dt (alpha div u* + c0 p*) - k lap p*,
 * with u* = tau(t) (a s, b s), s = sin(pi x) sin(pi y), so u* vanishes on the boundary.
 */
#pragma once

#include "biot/operators.hpp"
#include "biot/permeability.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace biot {

struct Physics {
    double lambda = 1.0;
    double mu = 1.0;
    double c0 = 0.0;     // storage; 0 is the incompressible-constituent case
    double alpha = 1.0;  // Biot-Willis coefficient

    void check() const {
        if (!(lambda >= 0.0) || !(mu > 0.0)) throw ConfigError("Lame parameters must satisfy lambda >= 0, mu > 0");
        if (!(c0 >= 0.0)) throw ConfigError("storage coefficient c0 must be >= 0");
        if (!(alpha > 0.0)) throw ConfigError("Biot-Willis alpha must be > 0");
    }
};

/// Analytic exact solution attached to manufactured cases.
struct ExactSolution {
    SpaceTimeVector u;
    std::function<std::array<double, 4>(double, double, double)> grad_u;  // du1/dx du1/dy du2/dx du2/dy
    SpaceTimeScalar p;
    SpaceTimeVector grad_p;
    SpaceTimeScalar div_u;
};

struct SourceCase {
    std::string name;
    SpaceTimeVector force;
    SpaceTimeScalar source;
    ScalarFunction d0;
    std::optional<ExactSolution> exact;
    std::vector<BcLayout> layouts;  // layouts the case is consistent with; empty means any
};

inline std::vector<std::string> source_case_names() {
    return {"zero", "mms1", "mms1_oscillating", "mms_neumann", "mms_mixed", "smooth-forcing", "relaxation", "incompatible"};
}

namespace detail {

enum class PressureShape { SinSin, CosCos, MixedLeft };

inline SourceCase manufactured_case(std::string name, PressureShape shape, const Physics& ph, double k,
                                    double omega = 0.0) {
    using std::cos;
    using std::exp;
    using std::sin;
    constexpr double pi = std::numbers::pi;
    constexpr double a = 1.0;
    constexpr double b = 0.5;
    const double lam = ph.lambda, mu = ph.mu, al = ph.alpha, c0 = ph.c0;
    // tau = exp(-t), or cos(omega t) when omega > 0
    const auto tau = [omega](double t) { return omega > 0.0 ? cos(omega * t) : exp(-t); };
    const auto dtau = [omega](double t) { return omega > 0.0 ? -omega * sin(omega * t) : -exp(-t); };

    // P(x, y), grad P, and the constant lap P / P.
    std::function<double(double, double)> P;
    std::function<std::array<double, 2>(double, double)> gradP;
    double lap_ratio = -2.0 * pi * pi;
    BcLayout layout = BcLayout::AllDirichlet;
    switch (shape) {
    case PressureShape::SinSin:
        P = [](double x, double y) { return sin(pi * x) * sin(pi * y); };
        gradP = [](double x, double y) {
            return std::array<double, 2>{pi * cos(pi * x) * sin(pi * y), pi * sin(pi * x) * cos(pi * y)};
        };
        break;
    case PressureShape::CosCos:
        P = [](double x, double y) { return cos(pi * x) * cos(pi * y); };
        gradP = [](double x, double y) {
            return std::array<double, 2>{-pi * sin(pi * x) * cos(pi * y), -pi * cos(pi * x) * sin(pi * y)};
        };
        layout = BcLayout::AllNeumann;
        break;
    case PressureShape::MixedLeft:
        P = [](double x, double y) { return sin(0.5 * pi * x) * cos(pi * y); };
        gradP = [](double x, double y) {
            return std::array<double, 2>{0.5 * pi * cos(0.5 * pi * x) * cos(pi * y),
                                         -pi * sin(0.5 * pi * x) * sin(pi * y)};
        };
        lap_ratio = -1.25 * pi * pi;
        layout = BcLayout::MixedLeftDirichlet;
        break;
    }

    const auto div_shape = [](double x, double y) {
        return pi * (a * cos(pi * x) * sin(pi * y) + b * sin(pi * x) * cos(pi * y));
    };

    SourceCase c;
    c.name = std::move(name);
    c.layouts = {layout};
    c.force = [=](double x, double y, double t) {
        const double s = sin(pi * x) * sin(pi * y);
        const double cc = cos(pi * x) * cos(pi * y);
        const auto gp = gradP(x, y);
        const double pp2 = pi * pi * tau(t);
        return std::array<double, 2>{
            pp2 * ((lam + 3.0 * mu) * a * s - (lam + mu) * b * cc) + al * tau(t) * gp[0],
            pp2 * ((lam + 3.0 * mu) * b * s - (lam + mu) * a * cc) + al * tau(t) * gp[1]};
    };
    c.source = [=](double x, double y, double t) {
        return dtau(t) * (al * div_shape(x, y) + c0 * P(x, y)) - k * lap_ratio * tau(t) * P(x, y);
    };
    c.d0 = [=](double x, double y) { return tau(0.0) * div_shape(x, y); };

    ExactSolution ex;
    ex.u = [=](double x, double y, double t) {
        const double s = tau(t) * sin(pi * x) * sin(pi * y);
        return std::array<double, 2>{a * s, b * s};
    };
    ex.grad_u = [=](double x, double y, double t) {
        const double gx = tau(t) * pi * cos(pi * x) * sin(pi * y);
        const double gy = tau(t) * pi * sin(pi * x) * cos(pi * y);
        return std::array<double, 4>{a * gx, a * gy, b * gx, b * gy};
    };
    ex.p = [=](double x, double y, double t) { return tau(t) * P(x, y); };
    ex.grad_p = [=](double x, double y, double t) {
        const auto g = gradP(x, y);
        return std::array<double, 2>{tau(t) * g[0], tau(t) * g[1]};
    };
    ex.div_u = [=](double x, double y, double t) { return tau(t) * div_shape(x, y); };
    c.exact = std::move(ex);
    return c;
}

}  // namespace detail

/**
 * Named analytic data. Manufactured cases ("mms*") need a constant
 * permeability because their source embeds k.
 */
inline SourceCase make_source_case(std::string_view name, const Physics& ph, const PermeabilityModel& perm) {
    using std::cos;
    using std::sin;
    constexpr double pi = std::numbers::pi;
    const auto zero_vec = [](double, double, double) { return std::array<double, 2>{0.0, 0.0}; };
    const auto zero_scalar = [](double, double, double) { return 0.0; };
    const auto zero_d0 = [](double, double) { return 0.0; };

    const auto need_constant = [&] {
        if (perm.kind != PermeabilityModel::Kind::Constant) {
            throw ConfigError("case '" + std::string(name) + "' requires the constant permeability model");
        }
        return perm(0.0);
    };

    if (name == "zero") return {"zero", zero_vec, zero_scalar, zero_d0, std::nullopt, {}};
    if (name == "mms1") return detail::manufactured_case("mms1", detail::PressureShape::SinSin, ph, need_constant());
    if (name == "mms1_oscillating") {
        return detail::manufactured_case("mms1_oscillating", detail::PressureShape::SinSin, ph, need_constant(),
                                         2.0 * pi);
    }
    if (name == "mms_neumann") {
        return detail::manufactured_case("mms_neumann", detail::PressureShape::CosCos, ph, need_constant());
    }
    if (name == "mms_mixed") {
        return detail::manufactured_case("mms_mixed", detail::PressureShape::MixedLeft, ph, need_constant());
    }
    if (name == "smooth-forcing") {
        // Zero-mean source, so every layout is compatible.
        SourceCase c;
        c.name = "smooth-forcing";
        c.force = [](double x, double y, double t) {
            const double s = sin(pi * x) * sin(pi * y);
            return std::array<double, 2>{2.0 * s * (1.0 + t), -s * (1.0 + t)};
        };
        c.source = [](double x, double y, double t) {
            return 2.0 * cos(pi * x) * cos(pi * y) * (1.0 + sin(pi * t));
        };
        c.d0 = zero_d0;
        return c;
    }
    if (name == "relaxation") {
        SourceCase c;
        c.name = "relaxation";
        c.force = zero_vec;
        c.source = zero_scalar;
        c.d0 = [](double x, double y) { return 0.1 * cos(pi * x) * cos(pi * y); };
        return c;
    }
    if (name == "incompatible") {
        SourceCase c;
        c.name = "incompatible";
        c.force = zero_vec;
        c.source = [](double, double, double) { return 1.0; };
        c.d0 = zero_d0;
        return c;
    }
    throw ConfigError("unknown source case '" + std::string(name) + "'");
}

/// Full problem description for one run.
struct BiotProblem {
    Discretization disc;
    PermeabilityModel perm;
    Physics physics;
    SourceCase sources;
    Field d0;  // initial dilation, zero mean
    double dt = 0.1;
    double T = 1.0;
    IncompatibleSourcePolicy policy = IncompatibleSourcePolicy::Correct;

    [[nodiscard]] int num_steps() const { return static_cast<int>(std::lround(T / dt)); }
    [[nodiscard]] double time(int step) const { return step * dt; }

    void check() const {
        physics.check();
        perm.check();
        if (!(dt > 0.0) || !(T > 0.0)) throw ConfigError("time step and horizon must be positive");
        if (dt > T * (1.0 + 1e-12)) throw ConfigError("time step exceeds the horizon");
        if (std::abs(num_steps() * dt - T) > 1e-9 * T) throw ConfigError("horizon is not a multiple of the time step");
        if (std::abs(mean_value(d0, disc.mesh())) > 1e-10) throw ConfigError("initial dilation must have zero mean");
    }
};

/**
 * Builds a problem from registry data. The initial dilation is interpolated
 * and projected onto zero mean.
 */
inline BiotProblem make_problem(const TriMesh& mesh, const PermeabilityModel& perm, const Physics& physics,
                                std::string_view case_name, double dt, double T,
                                IncompatibleSourcePolicy policy = IncompatibleSourcePolicy::Correct) {
    physics.check();
    Discretization disc(mesh, physics.lambda, physics.mu);
    SourceCase sources = make_source_case(case_name, physics, perm);
    if (!sources.layouts.empty() &&
        std::find(sources.layouts.begin(), sources.layouts.end(), mesh.layout) == sources.layouts.end()) {
        throw ConfigError("case '" + sources.name + "' is not consistent with layout '" +
                          std::string(to_string(mesh.layout)) + "'");
    }
    Field d0 = zero_mean_project(interpolate(sources.d0, disc.spaces()), disc.mesh());
    BiotProblem p{std::move(disc), perm, physics, std::move(sources), std::move(d0), dt, T, policy};
    p.check();
    return p;
}

}  // namespace biot
