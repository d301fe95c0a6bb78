#include "pdl/resistance_functions.hpp"

#include <algorithm>

#include "pdl/errors.hpp"

namespace pdl {

namespace {

Rational clamp01(Rational x) {
  if (x < Rational(0)) return Rational(0);
  if (x > Rational(1)) return Rational(1);
  return x;
}

}  // namespace

Rational StepTable::at(const Rational& x) const {
  if (knots.empty()) throw ConfigError("empty step table");
  if (x < knots.front().first) return knots.front().second;
  Rational v = knots.front().second;
  for (const auto& [kx, kv] : knots) {
    if (kx <= x) v = kv;
    else break;
  }
  return v;
}

ResistanceFunctions::ResistanceFunctions(FSpec f, GSpec g, Rational c_f, Rational f0, Rational g0)
    : f_(std::move(f)), g_(std::move(g)), c_f_(c_f), f0_(f0), g0_(g0) {
  validate();
}

ResistanceFunctions ResistanceFunctions::defaults() {
  FSpec f{LinearMap{Rational(1, 4), Rational(1, 5)}, std::nullopt};
  GSpec g{LinearMap{Rational(1, 2), Rational(2, 5)}, std::nullopt, std::nullopt};
  return ResistanceFunctions(f, g, Rational(19, 20), Rational(1, 2), Rational(1, 2));
}

ResistanceFunctions ResistanceFunctions::boundary_variant() {
  FSpec f{LinearMap{Rational(1, 4), Rational(1, 5)}, std::nullopt};
  GSpec g{LinearMap{Rational(1, 2), Rational(1, 2)}, std::nullopt, std::nullopt};
  return ResistanceFunctions(f, g, Rational(19, 20), Rational(1, 2), Rational(1, 2));
}

Rational ResistanceFunctions::f(Rational u) const {
  u = clamp01(u);
  if (f_.linear) return f_.linear->at(u);
  return f_.table->at(u);
}

Rational ResistanceFunctions::g(Rational ubar, Rational u) const {
  ubar = clamp01(ubar);
  u = clamp01(u);
  if (g_.at_one && u == Rational(1)) return *g_.at_one;
  Rational gap = u - ubar;
  if (g_.linear) return g_.linear->at(gap);
  return g_.table->at(gap);
}

std::vector<Rational> ResistanceFunctions::f_grid() const {
  std::vector<Rational> grid;
  for (int k = 0; k <= 200; ++k) grid.push_back(Rational(k, 200));
  if (f_.table)
    for (const auto& [x, v] : f_.table->knots) grid.push_back(clamp01(x));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

void ResistanceFunctions::validate() const {
  if (static_cast<bool>(f_.linear) == static_cast<bool>(f_.table))
    throw ConfigError("F must be given as exactly one of linear or table");
  if (static_cast<bool>(g_.linear) == static_cast<bool>(g_.table))
    throw ConfigError("G must be given as exactly one of linear or table");
  if (c_f_ <= Rational(0) || c_f_ >= Rational(1))
    throw ConfigError("c_F must lie strictly inside (0, 1)");
  if (f0_ < Rational(0) || g0_ < Rational(0))
    throw ConfigError("F0 and G0 must be nonnegative");
  if (f0_ + g0_ > Rational(1))
    throw ConfigError("admissibility violated: F0 + G0 <= 1 required, got " + (f0_ + g0_).str());

  Rational prev(-1);
  bool first = true;
  for (const Rational& u : f_grid()) {
    Rational v = f(u);
    if (v < Rational(0)) throw ConfigError("F must be nonnegative, F(" + u.str() + ") = " + v.str());
    if (!first && v > prev) throw ConfigError("F must be non-increasing");
    prev = v;
    first = false;
  }

  // G over gaps in (0, 1]: nonnegative, non-increasing in the gap, < G0.
  // For the linear form the supremum as gap -> 0+ is phi_G, so phi_G <= G0 and
  // the boundary case phi_G == G0 needs a strictly positive slope.
  if (g_.linear) {
    if (g_.linear->phi > g0_)
      throw ConfigError("G exceeds G0 near zero gap: phi_G = " + g_.linear->phi.str());
    if (g_.linear->phi == g0_ && g_.linear->psi <= Rational(0))
      throw ConfigError("G must stay strictly below G0 on positive gaps");
    if (g_.linear->at(Rational(1)) < Rational(0))
      throw ConfigError("G must be nonnegative on gap 1");
    if (g_.linear->psi < Rational(0))
      throw ConfigError("G must be non-increasing in the gap");
  } else {
    Rational gprev = g0_;
    bool gfirst = true;
    for (const auto& [d, v] : g_.table->knots) {
      if (d <= Rational(0) || d > Rational(1))
        throw ConfigError("G table knots must lie in (0, 1]");
      if (v < Rational(0)) throw ConfigError("G must be nonnegative");
      if (v >= g0_) throw ConfigError("G must stay strictly below G0");
      if (!gfirst && v > gprev) throw ConfigError("G must be non-increasing in the gap");
      gprev = v;
      gfirst = false;
    }
  }
  if (g_.at_one && (*g_.at_one < Rational(0) || *g_.at_one >= g0_))
    throw ConfigError("G(., 1) override must lie in [0, G0)");
}

void ResistanceFunctions::validate_for_agents(int n) const {
  if (n <= 0) throw ConfigError("agent count must be positive");
  Rational bound = f0_ / Rational(n);
  for (const Rational& u : f_grid()) {
    if (f(u) > bound)
      throw AssumptionError("admissibility violated: F(" + u.str() + ") = " + f(u).str() +
                            " exceeds F0/n = " + bound.str());
  }
}

void ResistanceFunctions::validate_memoryless(int n, const std::vector<Rational>& utilities) const {
  Rational bound = Rational(1, n);
  for (const Rational& u : utilities) {
    if (f(u) >= bound)
      throw AssumptionError("memoryless variant needs F(u) < 1/n; F(" + u.str() + ") = " +
                            f(u).str());
  }
}

}  // namespace pdl
