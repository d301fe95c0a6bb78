#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pdl/chain.hpp"
#include "pdl/graph.hpp"
#include "pdl/sim.hpp"

namespace pdl {

// Potential gamma(node) = weight of the minimum arborescence rooted at the
// node; the finite minimizers are the stochastically stable classes. When
// several nodes are absorbing every potential is infinite and the absorbing
// case must be handled upstream.
struct PotentialTable {
  std::vector<Resistance> gamma;
  std::vector<Arborescence> witness;
  std::vector<int> minimizers;
  bool all_infinite = false;
};

PotentialTable compute_potentials(const ResistanceGraph& graph);

enum class PredictionCase { kAbsorbing, kEquilibria, kTradeoff, kWelfare };
const char* prediction_case_name(PredictionCase c);

// One row per aligned state: the closed-form quantities next to the
// graph-derived ones, so the two derivations can be compared entry by entry.
struct AlignedRow {
  int state_index = -1;
  int node = -1;
  ActionProfile profile;
  std::vector<Rational> benchmarks;
  Rational t_welfare{0};
  std::optional<Rational> t_stability;  // empty at equilibrium states
  bool equilibrium = false;
  bool optimal = false;  // every benchmark equals 1
  Resistance r_star = Resistance::infinite();
  Resistance r_from_d = Resistance::infinite();
  Resistance gamma = Resistance::infinite();
};

struct SssPrediction {
  Algo algo = Algo::kItel;
  PredictionCase kind = PredictionCase::kEquilibria;
  std::vector<int> state_indices;  // chain indices of the predicted states
  std::vector<ActionProfile> profiles;
  std::vector<AlignedRow> table;   // all aligned states, chain order
  Resistance gamma_d = Resistance::infinite();
  // Smallest gamma gap from a predicted class to any other class (0 when the
  // prediction is by absorption).
  Rational margin{0};
  bool interdependent = false;
};

// Closed-form candidate sets cross-checked against the arborescence
// potentials; a mismatch is a consistency failure, not a result.
SssPrediction predict_sss_itel(const PMPChain& chain, const ResistanceGraph& graph);
SssPrediction predict_sss_iodl(const PMPChain& chain, const ResistanceGraph& graph);
SssPrediction predict_sss(const GameSpec& game, Algo algo, const ResistanceFunctions& rf,
                          int state_cap = kDefaultStateCap);

// Quantized-variant state classification over all weakly aligned candidates.
struct RitelStateInfo {
  GlobalState state;
  ActionProfile profile;
  std::vector<int> bins;
  bool strongly_aligned = false;
  bool equilibrium = false;        // bin-level, slack 0
  bool delta_equilibrium = false;  // bin-level, slack one bin
  bool optimal = false;            // every benchmark bin is the top bin
  Rational t_welfare{0};
  std::optional<Rational> ts_plus;   // defined iff not an equilibrium
  std::optional<Rational> ts_minus;  // defined iff not a delta-equilibrium
  double noise_resistance = 0;       // minimal offset-observation resistance
  bool noise_bound_based = false;
};

struct RitelClassification {
  GameSpec game;
  ResistanceFunctions rf = ResistanceFunctions::defaults();
  QuantizationParams quant;
  double tau0 = 0;
  std::vector<RitelStateInfo> states;  // the weakly aligned candidates
  std::vector<int> c_strong;           // strongly aligned
  std::vector<int> e_states;           // strongly aligned equilibria
  std::vector<int> e_delta;            // weakly aligned delta-equilibria
  std::vector<int> a_delta;            // weakly aligned, all bins at top
  std::vector<int> a_absorbing;        // a_delta with infinite noise resistance

  double r0() const;
  int find_state(const GlobalState& s) const;  // -1 when absent
};

RitelClassification classify_ritel_states(const GameSpec& game, const ResistanceFunctions& rf,
                                          const QuantizationParams& quant, double tau0);

struct RitelProfileRow {
  ActionProfile profile;
  std::vector<Rational> means;
  bool equilibrium = false;
  bool delta_equilibrium = false;
  bool three_delta_equilibrium = false;
  bool delta_optimal = false;  // every mean at least 1 - delta
  Rational tw{0};
  Rational tw_plus{0};
  Rational tw_minus{0};
  std::optional<Rational> ts;        // defined iff not an equilibrium
  std::optional<Rational> ts_plus;   // defined iff not a delta-equilibrium
  std::optional<Rational> ts_minus;  // defined iff not a 3delta-equilibrium
  bool predicted = false;
};

struct RitelPrediction {
  bool absorbing_case = false;     // nonempty A: prediction is exactly A
  std::vector<int> absorbing;      // indices into classification.states
  bool equilibria_case = false;    // E nonempty
  std::vector<int> state_superset;
  std::vector<ActionProfile> profile_superset;
  std::vector<RitelProfileRow> profile_table;
  std::string note;
};

RitelPrediction predict_sss_ritel(const RitelClassification& cls);

// Exact stationary distribution of a sparse row-stochastic matrix by dense
// linear solve on the unique closed class. Multiple closed classes yield a
// structural report instead of a distribution.
struct StationaryResult {
  std::vector<double> pi;  // full length; zero outside the closed class
  double residual = 0;
  bool unique_closed_class = true;
  std::vector<std::vector<int>> closed_classes;
};

StationaryResult stationary_distribution(const std::vector<std::vector<std::pair<int, double>>>& rows,
                                         int dense_cap = 4000);

std::vector<std::vector<std::pair<int, double>>> evaluate_chain(const PMPChain& chain, double eps);

// Executable form of the convergence statements: predicted set vs exact
// stationary mass vs simulated occupancy along a decreasing epsilon grid.
struct TheoremEpsRow {
  double eps = 0;
  std::optional<double> exact_mass;
  std::optional<double> best_other_mass;
  std::optional<double> sim_occupancy;
  bool pass = false;
};

struct TheoremReport {
  Algo algo = Algo::kItel;
  bool absorbing_case = false;
  std::vector<ActionProfile> predicted_profiles;
  std::vector<int> predicted_states;
  std::vector<TheoremEpsRow> rows;
  bool mass_increasing = false;
  bool passed = false;
  std::string note;
};

TheoremReport verify_theorem(const GameSpec& game, Algo algo, const ResistanceFunctions& rf,
                             const std::vector<double>& eps_grid, int64_t sim_steps,
                             int replicates, uint64_t seed, int state_cap = kDefaultStateCap);

// Quantized variant: mass inside the profile-level superset, by exact solve
// on the period chain and by simulation.
TheoremReport verify_theorem_ritel(const GameSpec& game, const ResistanceFunctions& rf,
                                   const QuantizationParams& quant, double tau0,
                                   const std::vector<double>& eps_grid, int64_t periods,
                                   int replicates, uint64_t seed,
                                   int state_cap = kDefaultStateCap);

}  // namespace pdl
