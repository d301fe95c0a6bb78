#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "pdl/rational.hpp"

namespace pdl {

// Sparse polynomial in eps with rational exponents and rational coefficients,
// kept sorted by exponent with no zero coefficients. Transition probabilities
// are built from terms like eps^r, 1 - eps^r and rational constants, so closure
// under + and * keeps every row exactly representable and row sums reduce to
// the constant-1 polynomial.
class EpsPoly {
 public:
  using Term = std::pair<Rational, Rational>;  // (exponent, coefficient)

  EpsPoly() = default;
  explicit EpsPoly(std::vector<Term> terms) : terms_(std::move(terms)) { normalize(); }

  static EpsPoly zero() { return EpsPoly(); }
  static EpsPoly constant(const Rational& c) {
    if (c.is_zero()) return zero();
    return EpsPoly({{Rational(0), c}});
  }
  static EpsPoly one() { return constant(Rational(1)); }
  // eps^r
  static EpsPoly power(const Rational& r) { return EpsPoly({{r, Rational(1)}}); }
  // 1 - eps^r, the complement mass of a resisted event
  static EpsPoly one_minus_power(const Rational& r) {
    if (r.is_zero()) return zero();
    return EpsPoly({{Rational(0), Rational(1)}, {r, Rational(-1)}});
  }

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_one() const {
    return terms_.size() == 1 && terms_[0].first.is_zero() && terms_[0].second == Rational(1);
  }

  friend EpsPoly operator+(const EpsPoly& a, const EpsPoly& b) {
    std::vector<Term> out;
    out.reserve(a.terms_.size() + b.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < a.terms_.size() && j < b.terms_.size()) {
      if (a.terms_[i].first == b.terms_[j].first) {
        Rational c = a.terms_[i].second + b.terms_[j].second;
        if (!c.is_zero()) out.push_back({a.terms_[i].first, c});
        ++i; ++j;
      } else if (a.terms_[i].first < b.terms_[j].first) {
        out.push_back(a.terms_[i++]);
      } else {
        out.push_back(b.terms_[j++]);
      }
    }
    while (i < a.terms_.size()) out.push_back(a.terms_[i++]);
    while (j < b.terms_.size()) out.push_back(b.terms_[j++]);
    EpsPoly r;
    r.terms_ = std::move(out);
    return r;
  }

  friend EpsPoly operator-(const EpsPoly& a, const EpsPoly& b) { return a + b.scaled(Rational(-1)); }

  friend EpsPoly operator*(const EpsPoly& a, const EpsPoly& b) {
    if (a.is_zero() || b.is_zero()) return zero();
    std::vector<Term> out;
    out.reserve(a.terms_.size() * b.terms_.size());
    for (const Term& ta : a.terms_)
      for (const Term& tb : b.terms_)
        out.push_back({ta.first + tb.first, ta.second * tb.second});
    return EpsPoly(std::move(out));
  }

  EpsPoly& operator+=(const EpsPoly& b) { *this = *this + b; return *this; }
  EpsPoly& operator*=(const EpsPoly& b) { *this = *this * b; return *this; }

  EpsPoly scaled(const Rational& c) const {
    if (c.is_zero()) return zero();
    EpsPoly r = *this;
    for (Term& t : r.terms_) t.second = t.second * c;
    return r;
  }

  friend bool operator==(const EpsPoly& a, const EpsPoly& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const EpsPoly& a, const EpsPoly& b) { return !(a == b); }

  double eval(double eps) const {
    double s = 0.0;
    for (const Term& t : terms_)
      s += t.second.to_double() * std::pow(eps, t.first.to_double());
    return s;
  }

  // Resistance = minimal exponent carrying a nonzero coefficient; +inf for the
  // zero polynomial. A probability must have a positive leading coefficient;
  // a cancelled or negative leading term is reported, never silently used.
  Resistance resistance() const {
    if (terms_.empty()) return Resistance::infinite();
    return Resistance::finite(terms_.front().first);
  }
  bool leading_coefficient_positive() const {
    return !terms_.empty() && terms_.front().second > Rational(0);
  }
  Rational leading_coefficient() const {
    if (terms_.empty()) throw ConsistencyError("leading coefficient of zero polynomial");
    return terms_.front().second;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (i) s += " + ";
      s += terms_[i].second.str();
      if (!terms_[i].first.is_zero()) s += "*e^" + terms_[i].first.str();
    }
    return s;
  }

 private:
  void normalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& a, const Term& b) { return a.first < b.first; });
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const Term& t : terms_) {
      if (!out.empty() && out.back().first == t.first) {
        out.back().second += t.second;
        if (out.back().second.is_zero()) out.pop_back();
      } else if (!t.second.is_zero()) {
        out.push_back(t);
      }
    }
    terms_ = std::move(out);
  }

  std::vector<Term> terms_;
};

}  // namespace pdl
