#include "assouad/rational.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "assouad/errors.hpp"

namespace assouad {

namespace {

double log_of_integer(const mpz_class& z) {
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::log(std::fabs(mant)) + static_cast<double>(exp) * std::log(2.0);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
  s = s.substr(start);
  if (s.empty()) throw DomainError("empty rational literal");

  const auto dot = s.find('.');
  if (dot != std::string::npos && s.find('/') == std::string::npos) {
    // Decimal literal: digits after the point become a power-of-ten denominator.
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    const std::size_t frac = s.size() - dot - 1;
    if (digits.empty() || digits == "-" || digits == "+") throw DomainError("malformed rational literal '" + s + "'");
    mpz_class num;
    if (num.set_str(digits[0] == '+' ? digits.substr(1) : digits, 10) != 0) {
      throw DomainError("malformed rational literal '" + s + "'");
    }
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac);
    Rational q(num, den);
    q.canonicalize();
    return q;
  }

  Rational q;
  if (q.set_str(s[0] == '+' ? s.substr(1) : s, 10) != 0) {
    throw DomainError("malformed rational literal '" + s + "'");
  }
  if (q.get_den() == 0) throw DomainError("zero denominator in '" + s + "'");
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

double to_double(const Rational& q, double floor) {
  if (q == 0) return 0.0;
  const double l = log_of(abs_of(q));
  if (l < std::log(floor)) return 0.0;
  return q.get_d();
}

double log_of(const Rational& q) {
  if (q <= 0) return -std::numeric_limits<double>::infinity();
  return log_of_integer(q.get_num()) - log_of_integer(q.get_den());
}

Rational approximate(double value, std::int64_t max_den) {
  if (!std::isfinite(value)) throw DomainError("cannot approximate a non-finite value");
  const bool negative = value < 0;
  double x = std::fabs(value);
  // Convergents h/k of the continued fraction of x.
  mpz_class h_prev = 1, h = static_cast<long>(std::floor(x));
  mpz_class k_prev = 0, k = 1;
  double frac = x - std::floor(x);
  for (int iter = 0; iter < 64 && frac > 1e-18; ++iter) {
    x = 1.0 / frac;
    const double a_d = std::floor(x);
    if (a_d > 1e15) break;
    const mpz_class a = static_cast<long>(a_d);
    mpz_class k_next = a * k + k_prev;
    if (k_next > max_den) break;
    mpz_class h_next = a * h + h_prev;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
    frac = x - a_d;
  }
  Rational q(h, k);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

Rational real_power(const Rational& base, double exponent) {
  if (base <= 0) throw DomainError("real_power needs a positive base");
  const double v = std::exp(exponent * log_of(base));
  if (v <= 0 || !std::isfinite(v)) {
    throw DomainError("real_power underflows/overflows a double for exponent " + std::to_string(exponent));
  }
  // Keep about seven significant digits regardless of magnitude.
  const double den_target = std::min(1e15, std::max(1e7, 1e7 / v));
  Rational q = approximate(v, static_cast<std::int64_t>(den_target));
  if (q <= 0) q = Rational(1, static_cast<long>(std::ceil(1.0 / v)));
  return q;
}

Rational int_power(const Rational& base, unsigned n) {
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), n);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), n);
  Rational q(num, den);
  q.canonicalize();
  return q;
}

}  // namespace assouad
