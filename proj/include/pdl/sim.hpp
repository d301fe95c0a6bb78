#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pdl/game.hpp"
#include "pdl/policy.hpp"

namespace pdl {

struct SimParams {
  double epsilon = 0.1;
  int64_t steps = 0;  // steps (trial-and-error) or periods (quantized variant)
  uint64_t seed = 0;
  int replicates = 1;
  // Quantized variant only:
  double tau0 = 0;
  QuantizationParams quant;
  bool strict = true;  // enforce the noise-control condition 2*tau0*delta^2 >= 1
  std::optional<GlobalState> initial;  // default: all-discontent
  int trace_stride = 0;                // 0 disables the trace
  double burn_in = 0.1;                // fraction of steps dropped in the burned view
};

// Non-increasing perturbation sequence for inhomogeneous runs.
struct Schedule {
  enum class Kind { kConstant, kPolynomial, kExponential, kTable };
  Kind kind = Kind::kConstant;
  double constant_eps = 0.1;
  double k0 = 1, gamma = 1;        // (k + k0)^(-1/gamma)
  double eps0 = 0.5, rate = 0.99;  // eps0 * rate^k
  std::vector<double> table;

  static Schedule constant(double eps);
  static Schedule polynomial(double k0, double gamma);
  static Schedule exponential(double eps0, double rate);
  static Schedule from_table(std::vector<double> values);

  double at(int64_t k) const;
  void validate(int64_t horizon) const;
  std::string str() const;
};

struct ReplicateResult {
  int index = 0;
  std::map<GlobalState, double> occupancy;         // fraction of steps per state
  std::map<GlobalState, double> occupancy_burned;  // with the first burn_in fraction dropped
  std::optional<std::pair<int64_t, GlobalState>> absorption;
  std::vector<GlobalState> trace;
  GlobalState final_state;
};

struct RunReport {
  Algo algo = Algo::kItel;
  SimParams params;
  std::vector<ReplicateResult> replicates;

  std::map<GlobalState, double> mean_occupancy(bool burned) const;
};

RunReport run_itel(const GameSpec& game, const SimParams& params, const ResistanceFunctions& rf);
RunReport run_iodl(const GameSpec& game, const SimParams& params, const ResistanceFunctions& rf);
RunReport run_ritel(const GameSpec& game, const SimParams& params, const ResistanceFunctions& rf);

// Inhomogeneous run: step k uses schedule.at(k). Trial-and-error variants
// only. States are recorded at logarithmically spaced checkpoints.
struct CooledReport {
  Algo algo = Algo::kItel;
  Schedule schedule;
  int64_t horizon = 0;
  uint64_t seed = 0;
  std::vector<int64_t> checkpoints;
  std::vector<std::vector<GlobalState>> state_at;  // [checkpoint][replicate]
};

CooledReport run_cooled(const GameSpec& game, Algo algo, const Schedule& schedule,
                        const ResistanceFunctions& rf, int64_t horizon, int replicates,
                        uint64_t seed, int checkpoint_count = 8);

// Replicate-level parallelism cap: min(replicates, hardware, PDL_THREADS).
int worker_count(int replicates);

}  // namespace pdl
