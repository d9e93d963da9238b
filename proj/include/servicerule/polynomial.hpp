#pragma once

#include <map>
#include <string>
#include <utility>

#include "servicerule/scalar.hpp"

namespace servicerule {

/// Bivariate polynomial in the serve probabilities p and q with exact
/// rational coefficients.
///
/// Models the scalar requirements of the win-by-one engine (ring operations
/// only), so running the engine with `Polynomial` yields the symbolic win
/// probability and expected length directly.
class Polynomial {
 public:
  using Exponents = std::pair<int, int>;  // (power of p, power of q)

  Polynomial() = default;
  Polynomial(long constant) { add_term(0, 0, Rational(constant)); }  // NOLINT(implicit)

  static Polynomial p() { return monomial(1, 0); }
  static Polynomial q() { return monomial(0, 1); }

  static Polynomial monomial(int p_power, int q_power, const Rational& coefficient = 1) {
    Polynomial out;
    out.add_term(p_power, q_power, coefficient);
    return out;
  }

  void add_term(int p_power, int q_power, const Rational& coefficient) {
    if (sgn(coefficient) == 0) return;
    auto [it, inserted] = terms_.try_emplace({p_power, q_power}, coefficient);
    if (!inserted) {
      it->second += coefficient;
      if (sgn(it->second) == 0) terms_.erase(it);
    }
  }

  const std::map<Exponents, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Rational coefficient(int p_power, int q_power) const {
    auto it = terms_.find({p_power, q_power});
    return it == terms_.end() ? Rational(0) : it->second;
  }

  Rational evaluate(const Rational& p_value, const Rational& q_value) const {
    Rational total = 0;
    for (const auto& [exp, coef] : terms_) {
      Rational term = coef;
      for (int i = 0; i < exp.first; ++i) term *= p_value;
      for (int j = 0; j < exp.second; ++j) term *= q_value;
      total += term;
    }
    return total;
  }

  Polynomial& operator+=(const Polynomial& rhs) {
    for (const auto& [exp, coef] : rhs.terms_) add_term(exp.first, exp.second, coef);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& rhs) {
    for (const auto& [exp, coef] : rhs.terms_) add_term(exp.first, exp.second, -coef);
    return *this;
  }
  Polynomial& operator*=(const Polynomial& rhs) {
    *this = *this * rhs;
    return *this;
  }

  friend Polynomial operator+(Polynomial lhs, const Polynomial& rhs) { return lhs += rhs; }
  friend Polynomial operator-(Polynomial lhs, const Polynomial& rhs) { return lhs -= rhs; }
  friend Polynomial operator-(const Polynomial& v) { return Polynomial() - v; }
  friend Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs) {
    Polynomial out;
    for (const auto& [a, ca] : lhs.terms_) {
      for (const auto& [b, cb] : rhs.terms_) {
        out.add_term(a.first + b.first, a.second + b.second, ca * cb);
      }
    }
    return out;
  }
  friend bool operator==(const Polynomial& lhs, const Polynomial& rhs) {
    return lhs.terms_ == rhs.terms_;
  }

  /// Renders e.g. "2p−p²−2pq+2p²q": ascending total degree, higher power of
  /// p first within a degree, Unicode superscripts and minus sign.
  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::multimap<std::pair<int, int>, std::pair<Exponents, Rational>> ordered;
    for (const auto& [exp, coef] : terms_) {
      ordered.emplace(std::make_pair(exp.first + exp.second, -exp.first), std::make_pair(exp, coef));
    }
    std::string out;
    bool first = true;
    for (const auto& [key, term] : ordered) {
      const auto& [exp, coef] = term;
      const bool negative = sgn(coef) < 0;
      const Rational magnitude = negative ? Rational(-coef) : coef;
      if (negative) {
        out += "−";
      } else if (!first) {
        out += "+";
      }
      const bool constant = exp.first == 0 && exp.second == 0;
      if (constant || magnitude != 1) out += magnitude.get_str();
      out += power_string('p', exp.first);
      out += power_string('q', exp.second);
      first = false;
    }
    return out;
  }

 private:
  static std::string power_string(char var, int power) {
    static const char* const kSuperscripts[] = {"⁰", "¹", "²", "³", "⁴",
                                                "⁵", "⁶", "⁷", "⁸", "⁹"};
    if (power == 0) return "";
    std::string out(1, var);
    if (power == 1) return out;
    std::string digits = std::to_string(power);
    for (char d : digits) out += kSuperscripts[d - '0'];
    return out;
  }

  std::map<Exponents, Rational> terms_;
};

template <>
struct ScalarTraits<Polynomial> {
  static constexpr bool exact = true;
  static Polynomial from_int(long v) { return Polynomial(v); }
  static bool is_zero(const Polynomial& v) { return v.is_zero(); }
  static Polynomial from_rational(const Rational& v) { return Polynomial::monomial(0, 0, v); }
};

}  // namespace servicerule
