#pragma once

#include <cmath>
#include <string>

#include "caflow/errors.hpp"
#include "caflow/rational.hpp"

namespace caflow {

// Resolved observation range at one n: coordinates {-g_minus, ..., g_plus}.
// Words are read off the p-padded window [-g_minus-p, g_plus+p]; the left
// extent insulates against left-side perturbations (paired with I^+), the
// right extent against right-side ones (paired with I^-).
struct GWindow {
    int g_minus = 0;
    int g_plus = 0;

    int word_lo(int p) const { return -g_minus - p; }
    int word_hi(int p) const { return g_plus + p; }
    int word_len(int p) const { return g_minus + g_plus + 2 * p + 1; }
};

// Velocity specification: linear (g_n = ceil(v*n)), sublinear families with
// diverging sum and o(n) growth, or pointwise (resolved per base point from
// the starred exponents).
struct VelocitySpec {
    enum class Kind { linear, sublinear_pow, sublinear_log, pointwise };
    Kind kind = Kind::linear;
    Rational v_minus{1, 1};
    Rational v_plus{1, 1};
    double coef = 1.0;   // sublinear families: coef * n^gamma or coef * log(n+1)
    double gamma = 0.5;  // sublinear_pow only, in (0,1)

    static VelocitySpec linear(Rational vm, Rational vp) {
        VelocitySpec v;
        v.kind = Kind::linear;
        v.v_minus = vm;
        v.v_plus = vp;
        if (vm.num < 0 || vp.num < 0) throw ConfigError("velocity components must be >= 0");
        return v;
    }
    static VelocitySpec sublinear_pow(double coef, double gamma) {
        if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("sublinear exponent must be in (0,1)");
        if (coef <= 0.0) throw ConfigError("sublinear coefficient must be > 0");
        VelocitySpec v;
        v.kind = Kind::sublinear_pow;
        v.coef = coef;
        v.gamma = gamma;
        return v;
    }
    static VelocitySpec sublinear_log(double coef) {
        if (coef <= 0.0) throw ConfigError("sublinear coefficient must be > 0");
        VelocitySpec v;
        v.kind = Kind::sublinear_log;
        v.coef = coef;
        return v;
    }
    static VelocitySpec pointwise() {
        VelocitySpec v;
        v.kind = Kind::pointwise;
        return v;
    }

    bool is_pointwise() const { return kind == Kind::pointwise; }

    GWindow resolve(int n) const {
        switch (kind) {
            case Kind::linear:
                return GWindow{static_cast<int>(v_minus.ceil_times(n)),
                               static_cast<int>(v_plus.ceil_times(n))};
            case Kind::sublinear_pow: {
                int g = static_cast<int>(std::ceil(coef * std::pow(static_cast<double>(n), gamma)));
                return GWindow{g, g};
            }
            case Kind::sublinear_log: {
                int g = static_cast<int>(std::ceil(coef * std::log(static_cast<double>(n) + 1.0)));
                return GWindow{g, g};
            }
            case Kind::pointwise:
                throw PreconditionError("pointwise velocity must be resolved per base point");
        }
        throw PreconditionError("unreachable");
    }

    std::string str() const {
        switch (kind) {
            case Kind::linear: return "linear(" + v_minus.str() + "," + v_plus.str() + ")";
            case Kind::sublinear_pow:
                return "sublinear_pow(" + std::to_string(coef) + ",n^" + std::to_string(gamma) + ")";
            case Kind::sublinear_log: return "sublinear_log(" + std::to_string(coef) + ")";
            case Kind::pointwise: return "pointwise";
        }
        return "?";
    }
};

} // namespace caflow
