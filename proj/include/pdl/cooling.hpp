#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "pdl/game.hpp"
#include "pdl/sim.hpp"

namespace pdl {

// Verdict on the divergence of sum_k epsilon_k^gamma. Divergence of that sum
// (for the right gamma) is what separates schedules that keep exploring enough
// from schedules that freeze early. gamma is caller-supplied; verdicts are
// relative to it.
struct DivergenceReport {
  enum class Verdict { kDiverges, kConverges, kInconclusive };
  Schedule schedule;
  double gamma = 1;
  int64_t horizon = 0;
  double partial_sum = 0;  // sum over k < horizon of schedule.at(k)^gamma
  Verdict verdict = Verdict::kInconclusive;
};

const char* verdict_name(DivergenceReport::Verdict v);

DivergenceReport divergence_test(const Schedule& schedule, double gamma, int64_t horizon);

// One cooled run batch per schedule; per checkpoint, the fraction of
// replicates whose state is all-content with benchmark profile in `target`,
// with a 95% Wilson interval.
struct ScheduleOutcome {
  Schedule schedule;
  std::vector<int64_t> checkpoints;
  std::vector<double> target_fraction;
  std::vector<std::pair<double, double>> ci;
  double final_fraction = 0;
};

struct ScheduleComparison {
  Algo algo = Algo::kItel;
  int64_t horizon = 0;
  int replicates = 0;
  uint64_t seed = 0;
  std::vector<ScheduleOutcome> outcomes;  // input order
  std::vector<int> ranking;               // indices by final fraction, best first
};

ScheduleComparison schedule_experiment(const GameSpec& game, Algo algo,
                                       const std::vector<Schedule>& schedules,
                                       const ResistanceFunctions& rf, int64_t horizon,
                                       int replicates, uint64_t seed,
                                       const std::set<ActionProfile>& target,
                                       int checkpoint_count = 8);

std::pair<double, double> wilson_interval(int successes, int trials);

}  // namespace pdl
