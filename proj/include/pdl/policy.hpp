#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pdl/eps_poly.hpp"
#include "pdl/game.hpp"
#include "pdl/resistance_functions.hpp"

namespace pdl {

enum class Algo { kItel, kIodl, kRitel };

std::string algo_name(Algo a);
Algo algo_from_name(const std::string& name);

enum class Mood : uint8_t { kContent, kDiscontent, kHopeful, kWatchful };

char mood_char(Mood m);

// Per-agent learning state. `value` is the benchmark utility for the
// trial-and-error variants and the benchmark bin index for the quantized one.
// Discontent agents carry no benchmark: action and value are canonical
// sentinels so all-discontent collapses to a single global state.
struct AgentState {
  Mood mood = Mood::kDiscontent;
  int action = -1;
  Rational value = Rational(-1);

  static AgentState discontent() { return AgentState{}; }
  static AgentState content(int action, const Rational& value) {
    return AgentState{Mood::kContent, action, value};
  }

  void canonicalize() {
    if (mood == Mood::kDiscontent) { action = -1; value = Rational(-1); }
  }

  friend bool operator==(const AgentState& a, const AgentState& b) {
    return a.mood == b.mood && a.action == b.action && a.value == b.value;
  }
  friend bool operator<(const AgentState& a, const AgentState& b);
};

struct GlobalState {
  std::vector<AgentState> agents;

  static GlobalState all_discontent(int n) { return GlobalState{std::vector<AgentState>(n)}; }

  void canonicalize() {
    for (AgentState& s : agents) s.canonicalize();
  }
  bool all_content() const {
    for (const AgentState& s : agents)
      if (s.mood != Mood::kContent) return false;
    return true;
  }
  bool any_discontent() const {
    for (const AgentState& s : agents)
      if (s.mood == Mood::kDiscontent) return true;
    return false;
  }
  bool is_all_discontent() const {
    for (const AgentState& s : agents)
      if (s.mood != Mood::kDiscontent) return false;
    return true;
  }
  // Benchmark action profile; valid only when no agent is discontent.
  ActionProfile benchmark_profile() const;

  friend bool operator==(const GlobalState& a, const GlobalState& b) { return a.agents == b.agents; }
  friend bool operator<(const GlobalState& a, const GlobalState& b) { return a.agents < b.agents; }
};

struct GlobalStateHash {
  std::size_t operator()(const GlobalState& s) const;
};

// "v" is benchmark-like: utility or bin index depending on the algorithm.
std::string state_label(const GlobalState& s, Algo algo);

// Evaluation context shared by the policy functions.
struct PolicyContext {
  Algo algo = Algo::kItel;
  const ResistanceFunctions* rf = nullptr;
  // Quantized variant only: bins per unit; benchmark values are bin indices in
  // [0, top_bin] and F/G are evaluated on bin lower edges.
  int top_bin = 0;
  Rational bin_width() const { return Rational(1, top_bin); }

  bool optimal_benchmark(const Rational& value) const {
    return algo == Algo::kRitel ? value == Rational(top_bin) : value == Rational(1);
  }
  Rational f_of(const Rational& value) const;              // F on utility or bin lower edge
  Rational g_of(const Rational& bench, const Rational& observed) const;
};

// Action rule. Discontent explores uniformly over all actions; content with a
// suboptimal benchmark keeps it with mass 1-eps and spreads eps over the
// remaining actions; everyone else plays the benchmark.
std::vector<std::pair<int, EpsPoly>> action_distribution(const AgentState& s, int action_count,
                                                         const PolicyContext& ctx);

// Update rule: distribution over successor agent states after playing
// `action` and observing `observed` (utility or bin index).
std::vector<std::pair<AgentState, EpsPoly>> update_distribution(const AgentState& s, int action,
                                                                const Rational& observed,
                                                                const PolicyContext& ctx);

int sample_action(const AgentState& s, int action_count, const PolicyContext& ctx, double eps,
                  std::mt19937_64& rng);
AgentState sample_update(const AgentState& s, int action, const Rational& observed,
                         const PolicyContext& ctx, double eps, std::mt19937_64& rng);

}  // namespace pdl
