#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bvinf {

/// Exact arbitrary-precision rational number. Always kept in canonical form
/// (reduced, positive denominator) by the underlying representation.
using Rational = mpq_class;

inline Rational rational_from_string(const std::string& s) {
    mpq_class q;
    if (q.set_str(s, 10) != 0)
        throw std::invalid_argument("malformed rational literal: '" + s + "'");
    q.canonicalize();
    return q;
}

/// Canonical rendering: "p" for integers, "p/q" otherwise, '-' prefix for
/// negative values.
inline std::string rational_to_string(const Rational& q) {
    return q.get_str();
}

inline Rational rational_pow(const Rational& base, long exp) {
    if (exp == 0) return Rational(1);
    if (base == 0) {
        if (exp < 0) throw std::domain_error("rational_pow: zero to negative power");
        return Rational(0);
    }
    Rational b = exp > 0 ? base : Rational(1) / base;
    long n = exp > 0 ? exp : -exp;
    Rational acc(1);
    for (long i = 0; i < n; ++i) acc *= b;
    return acc;
}

inline Rational factorial(long n) {
    if (n < 0) throw std::domain_error("factorial of negative integer");
    mpz_class acc(1);
    for (long i = 2; i <= n; ++i) acc *= i;
    return Rational(acc);
}

/// Double factorial n!! for odd n >= -1, with (-1)!! = 1 by convention.
inline Rational double_factorial_odd(long n) {
    if (n < -1 || n % 2 == 0)
        throw std::domain_error("double_factorial_odd: argument must be odd and >= -1");
    mpz_class acc(1);
    for (long i = n; i >= 1; i -= 2) acc *= i;
    return Rational(acc);
}

}  // namespace bvinf
