#pragma once

#include <optional>
#include <vector>

#include "pdl/rational.hpp"

namespace pdl {

// phi - psi * x, evaluated exactly.
struct LinearMap {
  Rational phi;
  Rational psi;
  Rational at(const Rational& x) const { return phi - psi * x; }
};

// Right-continuous step map: value of the last knot with knot.x <= x.
struct StepTable {
  std::vector<std::pair<Rational, Rational>> knots;  // sorted by x
  Rational at(const Rational& x) const;
};

// Acceptance resistance F for discontent agents: non-increasing map from
// utility (or bin lower edge) to a nonnegative exponent.
struct FSpec {
  std::optional<LinearMap> linear;
  std::optional<StepTable> table;
};

// Acceptance resistance G(ubar, u) for content explorers with u > ubar.
// Linear form depends on the gap u - ubar only; tables are step maps in the
// gap with an optional override at u == 1 (no resistance to adopt an optimum).
struct GSpec {
  std::optional<LinearMap> linear;  // phi - psi * (u - ubar)
  std::optional<StepTable> table;   // over the gap u - ubar
  std::optional<Rational> at_one;   // value when u == 1
};

class ResistanceFunctions {
 public:
  ResistanceFunctions(FSpec f, GSpec g, Rational c_f, Rational f0, Rational g0);

  static ResistanceFunctions defaults();          // phi_F=1/4 psi_F=1/5, phi_G=1/2 psi_G=2/5
  static ResistanceFunctions boundary_variant();  // phi_G=psi_G=1/2 so G(ubar,1)=... reaches 0 at gap 1

  // Arguments are clamped into [0,1] before evaluation.
  Rational f(Rational u) const;
  Rational g(Rational ubar, Rational u) const;

  const Rational& c_f() const { return c_f_; }
  const Rational& f0() const { return f0_; }
  const Rational& g0() const { return g0_; }
  const FSpec& f_spec() const { return f_; }
  const GSpec& g_spec() const { return g_; }

  // Shape checks plus the n-free part of the admissibility condition
  // (F >= 0, G >= 0, G < G0 on its domain, F0 + G0 <= 1). Throws ConfigError.
  void validate() const;
  // F(u) <= F0/n across the evaluation grid. Throws AssumptionError.
  void validate_for_agents(int n) const;
  // Memoryless variant needs the stronger F(u) < 1/n on the given utilities.
  void validate_memoryless(int n, const std::vector<Rational>& utilities) const;

 private:
  std::vector<Rational> f_grid() const;  // evaluation grid for validation

  FSpec f_;
  GSpec g_;
  Rational c_f_;
  Rational f0_;
  Rational g0_;
};

}  // namespace pdl
