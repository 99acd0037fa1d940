#ifndef PERCBRIDGE_RATIONAL_HPP
#define PERCBRIDGE_RATIONAL_HPP

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>

namespace percbridge {

// Exact rational scalar backing the enumeration oracles and exact DP mode.
using Rational = mpq_class;

inline Rational rational(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

Rational pow(const Rational& base, long exp);

// Parses "num/den", an integer, or a plain decimal like "0.45" (exactly, as 45/100).
std::optional<Rational> parse_rational(const std::string& text);

std::string to_string(const Rational& q);

inline double to_double(const Rational& q) { return q.get_d(); }

} // namespace percbridge

#endif
