#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "pdl/eps_poly.hpp"
#include "pdl/game.hpp"
#include "pdl/policy.hpp"

namespace pdl {

inline constexpr std::size_t kDefaultStateCap = 200000;

// Exact perturbed process over the reachable state space: states found by
// breadth-first closure from the all-discontent state, transition entries as
// polynomials in eps. Deterministic-utility variants only; every row reduces
// to the constant-1 polynomial exactly.
struct PMPChain {
  GameSpec game;
  Algo algo = Algo::kItel;
  ResistanceFunctions rf = ResistanceFunctions::defaults();

  std::vector<GlobalState> states;
  std::vector<std::vector<std::pair<int, EpsPoly>>> rows;  // sorted by target
  int d_index = 0;

  PolicyContext context() const { return PolicyContext{algo, &rf, 0}; }
  // -1 when the state is not part of the chain.
  int state_index(const GlobalState& s) const;

  std::unordered_map<GlobalState, int, GlobalStateHash> index;
};

PMPChain build_chain(const GameSpec& game, Algo algo, const ResistanceFunctions& rf,
                     std::size_t cap = kDefaultStateCap);

std::vector<GlobalState> enumerate_states(const GameSpec& game, Algo algo,
                                          const ResistanceFunctions& rf,
                                          std::size_t cap = kDefaultStateCap);

// Recomputes one row from the policy tables (states already enumerated).
std::vector<std::pair<int, EpsPoly>> build_transition_row(const PMPChain& chain, int state);

// Entrywise eps -> 0 limit: the exponent-zero coefficients. Sparse rows,
// re-checked stochastic.
std::vector<std::vector<std::pair<int, double>>> unperturbed_limit(const PMPChain& chain);

// Quantized variant at a fixed eps: numeric probabilities combining policy
// masses with exact (or Monte Carlo) period-sampling tails.
struct NumericChain {
  GameSpec game;
  ResistanceFunctions rf = ResistanceFunctions::defaults();
  QuantizationParams quant;
  double eps = 0;
  int64_t tau = 0;

  std::vector<GlobalState> states;
  std::vector<std::vector<std::pair<int, double>>> rows;
  int d_index = 0;
  bool tails_exact = true;
  double max_mc_half_width = 0;

  PolicyContext context() const { return PolicyContext{Algo::kRitel, &rf, quant.top_bin()}; }
  int state_index(const GlobalState& s) const;

  std::unordered_map<GlobalState, int, GlobalStateHash> index;
};

NumericChain build_ritel_numeric_chain(const GameSpec& game, const ResistanceFunctions& rf,
                                       const QuantizationParams& quant, double tau0, double eps,
                                       std::size_t cap = kDefaultStateCap);

}  // namespace pdl
