#include "pdl/cooling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pdl/errors.hpp"

namespace pdl {

const char* verdict_name(DivergenceReport::Verdict v) {
  switch (v) {
    case DivergenceReport::Verdict::kDiverges: return "diverges";
    case DivergenceReport::Verdict::kConverges: return "converges";
    case DivergenceReport::Verdict::kInconclusive: return "inconclusive";
  }
  return "unknown";
}

DivergenceReport divergence_test(const Schedule& schedule, double gamma, int64_t horizon) {
  if (!(gamma > 0)) throw ConfigError("gamma must be positive");
  schedule.validate(horizon);

  DivergenceReport report;
  report.schedule = schedule;
  report.gamma = gamma;
  report.horizon = horizon;
  double sum = 0;
  for (int64_t k = 0; k < horizon; ++k) sum += std::pow(schedule.at(k), gamma);
  report.partial_sum = sum;

  using V = DivergenceReport::Verdict;
  switch (schedule.kind) {
    case Schedule::Kind::kConstant:
      report.verdict = V::kDiverges;
      break;
    case Schedule::Kind::kPolynomial:
      // Terms are (k+k0)^(-gamma/schedule.gamma): divergent iff the exponent
      // ratio is at most 1.
      report.verdict = gamma / schedule.gamma <= 1.0 ? V::kDiverges : V::kConverges;
      break;
    case Schedule::Kind::kExponential:
      report.verdict = schedule.rate < 1.0 ? V::kConverges : V::kDiverges;
      break;
    case Schedule::Kind::kTable:
      report.verdict = V::kInconclusive;
      break;
  }
  return report;
}

std::pair<double, double> wilson_interval(int successes, int trials) {
  if (trials <= 0) throw ConfigError("trials must be positive");
  const double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

ScheduleComparison schedule_experiment(const GameSpec& game, Algo algo,
                                       const std::vector<Schedule>& schedules,
                                       const ResistanceFunctions& rf, int64_t horizon,
                                       int replicates, uint64_t seed,
                                       const std::set<ActionProfile>& target,
                                       int checkpoint_count) {
  if (schedules.empty()) throw ConfigError("schedule_experiment needs at least one schedule");
  if (target.empty()) throw ConfigError("schedule_experiment needs a nonempty target set");

  ScheduleComparison cmp;
  cmp.algo = algo;
  cmp.horizon = horizon;
  cmp.replicates = replicates;
  cmp.seed = seed;

  for (const Schedule& sched : schedules) {
    const CooledReport run =
        run_cooled(game, algo, sched, rf, horizon, replicates, seed, checkpoint_count);
    ScheduleOutcome out;
    out.schedule = sched;
    out.checkpoints = run.checkpoints;
    for (std::size_t c = 0; c < run.checkpoints.size(); ++c) {
      int hits = 0;
      for (const GlobalState& x : run.state_at[c])
        if (x.all_content() && target.count(x.benchmark_profile()) > 0) ++hits;
      out.target_fraction.push_back(static_cast<double>(hits) / static_cast<double>(replicates));
      out.ci.push_back(wilson_interval(hits, replicates));
    }
    out.final_fraction = out.target_fraction.back();
    cmp.outcomes.push_back(std::move(out));
  }

  cmp.ranking.resize(cmp.outcomes.size());
  std::iota(cmp.ranking.begin(), cmp.ranking.end(), 0);
  std::stable_sort(cmp.ranking.begin(), cmp.ranking.end(), [&](int a, int b) {
    return cmp.outcomes[a].final_fraction > cmp.outcomes[b].final_fraction;
  });
  return cmp;
}

}  // namespace pdl
