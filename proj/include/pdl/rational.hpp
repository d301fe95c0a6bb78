#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "pdl/errors.hpp"

namespace pdl {

// Exact rational on int64. Resistances and polynomial exponents must compare
// exactly; doubles are derived views only. Intermediates run through __int128
// and overflow past int64 throws instead of wrapping.
class Rational {
 public:
  constexpr Rational() : num_(0), den_(1) {}
  constexpr Rational(int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  Rational(int64_t n, int64_t d) {
    if (d == 0) throw ConsistencyError("rational with zero denominator");
    __int128 nn = n, dd = d;
    if (dd < 0) { nn = -nn; dd = -dd; }
    normalize_assign(nn, dd);
  }

  // Best rational approximation by continued fractions. Recovers grid values
  // (0.05 steps, thirds, ...) exactly from their double representation.
  static Rational from_double(double x, int64_t max_den = 1000000000, double tol = 1e-9) {
    if (!std::isfinite(x)) throw ConfigError("cannot represent non-finite value as rational");
    bool neg = x < 0;
    double v = neg ? -x : x;
    int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double frac = v;
    for (int it = 0; it < 64; ++it) {
      double fl = std::floor(frac);
      if (fl > static_cast<double>(max_den)) break;
      int64_t a = static_cast<int64_t>(fl);
      __int128 p2 = static_cast<__int128>(a) * p1 + p0;
      __int128 q2 = static_cast<__int128>(a) * q1 + q0;
      if (q2 > max_den || p2 > max_den) break;
      p0 = p1; q0 = q1;
      p1 = static_cast<int64_t>(p2); q1 = static_cast<int64_t>(q2);
      double rem = frac - fl;
      if (q1 > 0 && std::abs(v - static_cast<double>(p1) / static_cast<double>(q1)) <= tol) break;
      if (rem < 1e-15) break;
      frac = 1.0 / rem;
    }
    if (q1 == 0 || std::abs(v - static_cast<double>(p1) / static_cast<double>(q1)) > tol)
      throw ConfigError("value " + std::to_string(x) + " has no small rational representation");
    return neg ? Rational(-p1, q1) : Rational(p1, q1);
  }

  int64_t num() const { return num_; }
  int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  bool is_integer() const { return den_ == 1; }
  bool is_zero() const { return num_ == 0; }

  int64_t floor() const {
    int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return make(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return make(static_cast<__int128>(a.num_) * b.den_ - static_cast<__int128>(b.num_) * a.den_,
                static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return make(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw ConsistencyError("rational division by zero");
    __int128 n = static_cast<__int128>(a.num_) * b.den_;
    __int128 d = static_cast<__int128>(a.den_) * b.num_;
    if (d < 0) { n = -n; d = -d; }
    return make(n, d);
  }
  Rational operator-() const { Rational r; r.num_ = -num_; r.den_ = den_; return r; }
  Rational& operator+=(const Rational& b) { *this = *this + b; return *this; }
  Rational& operator-=(const Rational& b) { *this = *this - b; return *this; }
  Rational& operator*=(const Rational& b) { *this = *this * b; return *this; }
  Rational& operator/=(const Rational& b) { *this = *this / b; return *this; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  static Rational make(__int128 n, __int128 d) {
    Rational r;
    r.normalize_assign(n, d);
    return r;
  }
  void normalize_assign(__int128 n, __int128 d) {
    if (n == 0) { num_ = 0; den_ = 1; return; }
    __int128 a = n < 0 ? -n : n, b = d;
    while (b != 0) { __int128 t = a % b; a = b; b = t; }
    n /= a; d /= a;
    constexpr __int128 lo = INT64_MIN, hi = INT64_MAX;
    if (n < lo || n > hi || d > hi)
      throw ConsistencyError("rational overflow past 64 bits");
    num_ = static_cast<int64_t>(n);
    den_ = static_cast<int64_t>(d);
  }

  int64_t num_;
  int64_t den_;
};

inline Rational abs(const Rational& r) { return r < Rational(0) ? -r : r; }

inline Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

// Resistance value: a nonnegative rational or +infinity. Infinity is explicit,
// never a sentinel number, and all arithmetic saturates.
struct Resistance {
  bool inf = false;
  Rational value;

  static Resistance infinite() { return {true, Rational(0)}; }
  static Resistance finite(const Rational& v) { return {false, v}; }

  bool is_finite() const { return !inf; }

  friend Resistance operator+(const Resistance& a, const Resistance& b) {
    if (a.inf || b.inf) return infinite();
    return finite(a.value + b.value);
  }
  friend bool operator==(const Resistance& a, const Resistance& b) {
    if (a.inf || b.inf) return a.inf == b.inf;
    return a.value == b.value;
  }
  friend bool operator!=(const Resistance& a, const Resistance& b) { return !(a == b); }
  friend bool operator<(const Resistance& a, const Resistance& b) {
    if (a.inf) return false;
    if (b.inf) return true;
    return a.value < b.value;
  }
  friend bool operator>(const Resistance& a, const Resistance& b) { return b < a; }
  friend bool operator<=(const Resistance& a, const Resistance& b) { return !(b < a); }
  friend bool operator>=(const Resistance& a, const Resistance& b) { return !(a < b); }

  double to_double() const { return inf ? std::numeric_limits<double>::infinity() : value.to_double(); }
  std::string str() const { return inf ? "inf" : value.str(); }
};

inline Resistance min(const Resistance& a, const Resistance& b) { return a < b ? a : b; }

struct RationalHash {
  std::size_t operator()(const Rational& r) const {
    std::size_t h = std::hash<int64_t>()(r.num());
    h ^= std::hash<int64_t>()(r.den()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

}  // namespace pdl
