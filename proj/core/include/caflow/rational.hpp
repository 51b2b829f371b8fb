#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "caflow/errors.hpp"

namespace caflow {

// Exact rational used for probabilities given as text ("1/3", "0.25"),
// velocity coefficients, and rotation-number convergents.
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw ConfigError("rational with zero denominator");
        if (den < 0) { num = -num; den = -den; }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }

    // ceil(this * n) for n >= 0; used to resolve linear velocities.
    long long ceil_times(long long n) const {
        long long p = num * n;
        long long q = p / den;
        if (p % den != 0 && p > 0) ++q;
        return q;
    }

    std::string str() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }
};

// Parses "a/b", plain integers, and decimal literals exactly.
Rational parse_rational(const std::string& text);

} // namespace caflow
