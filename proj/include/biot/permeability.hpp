/**
 * @file permeability.hpp
 * @brief Dilation-dependent permeability laws clamped to [k1, k2].
 */
#pragma once

#include "biot/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace biot {

struct PermeabilityModel {
    enum class Kind { Constant, CarmanKozeny, Quadratic };

    Kind kind = Kind::Constant;
    double k0 = 1.0;     // Constant
    double scale = 1.0;  // CarmanKozeny: scale * y^3 / (1 - y)^2
    double a = 1.0;      // Quadratic: a + b y + c y^2
    double b = 0.0;
    double c = 0.0;
    double k1 = 1e-3;
    double k2 = 1e3;

    static PermeabilityModel constant(double k0, double k1, double k2) {
        PermeabilityModel m;
        m.kind = Kind::Constant;
        m.k0 = k0;
        m.k1 = k1;
        m.k2 = k2;
        m.check();
        return m;
    }

    static PermeabilityModel carman_kozeny(double scale, double k1, double k2) {
        PermeabilityModel m;
        m.kind = Kind::CarmanKozeny;
        m.scale = scale;
        m.k1 = k1;
        m.k2 = k2;
        m.check();
        return m;
    }

    static PermeabilityModel quadratic(double a, double b, double c, double k1, double k2) {
        PermeabilityModel m;
        m.kind = Kind::Quadratic;
        m.a = a;
        m.b = b;
        m.c = c;
        m.k1 = k1;
        m.k2 = k2;
        m.check();
        return m;
    }

    void check() const {
        if (!(k1 > 0.0) || !(k2 >= k1) || !std::isfinite(k2)) {
            throw ConfigError("permeability bounds must satisfy 0 < k1 <= k2 < inf");
        }
        if (kind == Kind::CarmanKozeny && !(scale > 0.0 && std::isfinite(scale))) {
            throw ConfigError("Carman-Kozeny scale must be positive");
        }
        if (!std::isfinite(k0) || !std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
            throw ConfigError("permeability coefficients must be finite");
        }
    }

    [[nodiscard]] bool depends_on_dilation() const { return kind != Kind::Constant; }

    /// k(y), always inside [k1, k2].
    [[nodiscard]] double operator()(double y) const {
        if (!std::isfinite(y)) throw std::invalid_argument("permeability: non-finite dilation value");
        double raw = 0.0;
        switch (kind) {
        case Kind::Constant: raw = k0; break;
        case Kind::CarmanKozeny:
            if (y == 1.0) return k2;
            raw = scale * y * y * y / ((1.0 - y) * (1.0 - y));
            break;
        case Kind::Quadratic: raw = a + b * y + c * y * y; break;
        }
        if (std::isnan(raw)) return k2;
        return std::clamp(raw, k1, k2);
    }
};

inline double eval_permeability(const PermeabilityModel& model, double y) { return model(y); }

inline std::string_view to_string(PermeabilityModel::Kind kind) {
    switch (kind) {
    case PermeabilityModel::Kind::Constant: return "constant";
    case PermeabilityModel::Kind::CarmanKozeny: return "carman_kozeny";
    case PermeabilityModel::Kind::Quadratic: return "quadratic";
    }
    return "unknown";
}

}  // namespace biot
