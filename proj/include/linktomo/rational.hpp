#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "linktomo/error.hpp"

namespace linktomo {

/// Exact rational on 64-bit integers. Expansion parameters are tiny fractions
/// (lambda over 2d), so no arbitrary precision is needed here; comparisons are
/// done by 128-bit cross multiplication and never touch floating point.
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;

    Rational(long long n, long long d = 1) : num(n), den(d) {
        if (den == 0) fail(Errc::bad_input, "rational with zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }

    friend bool operator<(const Rational& a, const Rational& b) {
        return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
    }

    friend bool operator<=(const Rational& a, const Rational& b) { return a < b || a == b; }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator>=(const Rational& a, const Rational& b) { return b <= a; }
};

} // namespace linktomo
