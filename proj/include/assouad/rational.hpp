#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace assouad {

/// Exact rational number. All set geometry, interval endpoints, weights and
/// masses are carried in this type; doubles only appear in logarithms.
using Rational = mpq_class;

/// Parses "num/den", "num" or a plain decimal such as "0.4" into an exact
/// rational. Throws DomainError on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

/// Canonical "num/den" form (denominator always present, lowest terms).
std::string to_string(const Rational& q);

/// Conversion to double that never produces a denormal: values below
/// `floor` in magnitude are flushed to zero.
double to_double(const Rational& q, double floor = 1e-300);

/// Natural logarithm of a positive rational, accurate even when the value
/// underflows a double (e.g. 2^-4096).
double log_of(const Rational& q);

/// Best rational approximation of `value` with denominator at most
/// `max_den`, by continued fractions.
Rational approximate(double value, std::int64_t max_den = 1 << 24);

/// Rational stand-in for the real power base^exponent. The result is the
/// continued-fraction approximation of the double power; every weight rule
/// that mentions s^D uses this exact value, so comparisons stay exact.
Rational real_power(const Rational& base, double exponent);

/// base^n for integer n >= 0.
Rational int_power(const Rational& base, unsigned n);

inline Rational abs_of(const Rational& q) { return q < 0 ? Rational(-q) : q; }
inline const Rational& min_of(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline const Rational& max_of(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace assouad
