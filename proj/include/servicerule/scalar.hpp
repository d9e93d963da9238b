#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace servicerule {

/// Exact rational number. All analysis operations default to this type.
using Rational = mpq_class;

/// Numeric capabilities the engines need beyond ring arithmetic.
///
/// Specialized for `double`, `Rational` and (in polynomial.hpp) the symbolic
/// `Polynomial`. A scalar type must support `+ - *` and construction from an
/// integer; division and ordering are only required by the operations that
/// actually divide or compare (deuce solver, strategy verdicts).
template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static double from_int(long v) { return static_cast<double>(v); }
  static bool is_zero(double v) { return std::abs(v) < 1e-14; }
  /// Strict improvement with a small absolute slack for rounding noise.
  static bool greater(double a, double b) { return a > b + 1e-12; }
  static double to_double(double v) { return v; }
  static double from_rational(const mpq_class& v) { return v.get_d(); }
};

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static Rational from_int(long v) { return Rational(v); }
  static bool is_zero(const Rational& v) { return sgn(v) == 0; }
  static bool greater(const Rational& a, const Rational& b) { return a > b; }
  static double to_double(const Rational& v) { return v.get_d(); }
  static Rational from_rational(const Rational& v) { return v; }
};

template <class T>
T scalar_from_int(long v) {
  return ScalarTraits<T>::from_int(v);
}

template <class T>
T scalar_from_rational(const Rational& v) {
  return ScalarTraits<T>::from_rational(v);
}

/// base^exponent by repeated multiplication (exponent >= 0).
template <class T>
T power(const T& base, int exponent) {
  T out = scalar_from_int<T>(1);
  for (int i = 0; i < exponent; ++i) out *= base;
  return out;
}

/// Binomial coefficient as an exact integer; zero outside 0 <= r <= n.
inline mpz_class binomial(long n, long r) {
  if (r < 0 || n < 0 || r > n) return 0;
  mpz_class out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(r));
  return out;
}

template <class T>
double to_double(const T& v) {
  return ScalarTraits<T>::to_double(v);
}

/// Parses "a/b", an integer, or a plain decimal ("0.75") into an exact
/// rational. Throws std::invalid_argument on anything else.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto bad = [&] { return std::invalid_argument("not a rational number: '" + s + "'"); };
  if (s.empty()) throw bad();
  const auto dot = s.find('.');
  if (dot != std::string::npos) {
    if (s.find('/') != std::string::npos || s.find('.', dot + 1) != std::string::npos) throw bad();
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    const std::size_t scale = s.size() - dot - 1;
    bool negative = false;
    if (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) {
      negative = digits[0] == '-';
      digits.erase(0, 1);
    }
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) throw bad();
    mpz_class num(digits, 10);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, scale);
    Rational r(negative ? mpz_class(-num) : num, den);
    r.canonicalize();
    return r;
  }
  const auto body = s.front() == '-' || s.front() == '+' ? s.substr(1) : s;
  if (body.empty() || body.find_first_not_of("0123456789/") != std::string::npos ||
      body.front() == '/' || body.back() == '/' ||
      body.find('/') != body.rfind('/')) {
    throw bad();
  }
  Rational r;
  if (r.set_str(s.front() == '+' ? s.substr(1) : s, 10) != 0) throw bad();
  if (sgn(r.get_den()) == 0) throw bad();
  r.canonicalize();
  return r;
}

/// Rounds `value` to `places` decimals, ties to even, and renders it with
/// exactly that many fractional digits.
inline std::string to_fixed(const Rational& value, int places) {
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(places));
  Rational scaled(value);
  scaled.canonicalize();  // tolerate hand-built, non-reduced inputs
  scaled *= scale;
  const bool negative = sgn(scaled) < 0;
  if (negative) scaled = -scaled;
  mpz_class floor_part;
  mpz_fdiv_q(floor_part.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
  const Rational remainder = scaled - Rational(floor_part);
  const Rational half(1, 2);
  if (remainder > half || (remainder == half && mpz_odd_p(floor_part.get_mpz_t()))) {
    floor_part += 1;
  }
  std::string digits = floor_part.get_str();
  if (places > 0) {
    if (digits.size() <= static_cast<std::size_t>(places)) {
      digits.insert(0, static_cast<std::size_t>(places) + 1 - digits.size(), '0');
    }
    digits.insert(digits.size() - static_cast<std::size_t>(places), ".");
  }
  if (negative && floor_part != 0) digits.insert(0, "-");
  return digits;
}

inline std::string to_fixed(double value, int places) {
  // A finite double converts to a rational exactly, so rounding stays exact.
  return to_fixed(Rational(value), places);
}

/// "a/b" form used by the JSON writer ("3" when the denominator is one).
inline std::string to_fraction_string(const Rational& value) { return value.get_str(); }

}  // namespace servicerule
