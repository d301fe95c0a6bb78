#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pdl/rational.hpp"
#include "pdl/resistance_functions.hpp"

namespace pdl {

using ActionProfile = std::vector<int>;

// Random utility with finite support on [0, 1]. Atoms are sorted by value,
// weights are positive and sum to 1 exactly. A single atom is semantically
// deterministic; the declared_deterministic flag is metadata only.
struct UtilityModel {
  std::vector<std::pair<Rational, Rational>> atoms;  // (value, weight)
  bool declared_deterministic = false;

  static UtilityModel deterministic(const Rational& v);
  static UtilityModel finite_support(std::vector<std::pair<Rational, Rational>> atoms);

  bool is_deterministic() const { return atoms.size() == 1; }
  Rational mean() const;
  Rational variance() const;
  Rational ess_min() const { return atoms.front().first; }
  Rational ess_max() const { return atoms.back().first; }
};

struct GameSpec {
  std::string name;
  int agents = 0;
  std::vector<int> actions;                          // actions per agent
  std::vector<std::vector<UtilityModel>> utilities;  // [agent][profile index]

  int profile_count() const;
  int profile_index(const ActionProfile& a) const;  // row-major, last agent fastest
  ActionProfile profile_at(int index) const;
  const UtilityModel& utility(int agent, const ActionProfile& a) const;
  Rational mean(int agent, const ActionProfile& a) const;
  bool deterministic() const;
  // Sorted unique observable utility values for one agent (atom values across
  // all profiles). For deterministic games this is the achievable-benchmark set.
  std::vector<Rational> observable_values(int agent) const;
  std::vector<Rational> mean_values(int agent) const;

  void validate() const;  // shape, ranges, weight sums
};

// delta = 1/q with integer q; bins [0,delta), ..., [1-delta,1), {1}.
// Bin k has lower edge k*delta; the top bin {1} has index q.
struct QuantizationParams {
  int64_t q = 0;

  static QuantizationParams from_delta(double delta);
  static QuantizationParams from_q(int64_t q);
  Rational delta() const { return Rational(1, q); }
  int top_bin() const { return static_cast<int>(q); }
  int bin_of(const Rational& u) const;              // boundary belongs to the upper bin
  Rational lower_edge(int bin) const { return Rational(bin, q); }
};

struct ProfileStats {
  ActionProfile profile;
  std::vector<Rational> means;
  std::vector<int> bins;
  Rational welfare;
  std::optional<Rational> stability;  // empty at equilibrium profiles
};

struct InterdependenceWitness {
  ActionProfile profile;
  std::vector<int> subset;  // the agent subset no outside agent reacts to
};

Rational mean_utility(const GameSpec& game, int agent, const ActionProfile& a);

// A game is interdependent when from every profile, every proper nonempty
// agent subset can move some outside agent's mean utility by a joint deviation.
std::optional<InterdependenceWitness> check_interdependence(const GameSpec& game);
// Quantized variant: the move must be at least 3*delta in absolute value
// (strict inequality to zero when delta == 0).
std::optional<InterdependenceWitness> check_3delta_interdependence(const GameSpec& game,
                                                                   const Rational& delta);

// Profiles where no unilateral deviation improves any agent's mean by more than rho.
std::vector<ActionProfile> find_rho_equilibria(const GameSpec& game, const Rational& rho);

Rational welfare(const GameSpec& game, const ActionProfile& a);
// Largest unilateral mean improvement; empty when the profile is an equilibrium.
std::optional<Rational> stability(const GameSpec& game, const ActionProfile& a);

// Virtual welfare of a profile: 1 - sum_i F(mu_i + sign*delta), sign in {-1,+1}.
Rational virtual_welfare_profile(const GameSpec& game, const ActionProfile& a,
                                 const ResistanceFunctions& rf, const Rational& delta, int sign);

// Virtual stability of a profile. sign=+1 requires the profile not to be a
// delta-equilibrium and scans improving deviations (M > mu); sign=-1 requires
// not a 3*delta-equilibrium and scans deviations with M > mu + 3*delta.
std::optional<Rational> virtual_stability_profile(const GameSpec& game, const ActionProfile& a,
                                                  const ResistanceFunctions& rf,
                                                  const Rational& delta, int sign);

ProfileStats compute_profile_stats(const GameSpec& game, const ActionProfile& a,
                                   const QuantizationParams& quant);

// Built-in example games. Names: baseline, cyclic, dilemma, all_one,
// baseline_noisy, trap.
GameSpec make_fixture(const std::string& name);
std::vector<std::string> fixture_names();

}  // namespace pdl
