#include "pdl/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "pdl/errors.hpp"
#include "pdl/large_deviations.hpp"

namespace pdl {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent stream per (seed, replicate, agent); agent i's stream drives its
// action draws, utility draws, and update draws, in step order.
std::mt19937_64 agent_stream(uint64_t seed, int replicate, int agent) {
  uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ (0x9E3779B97F4A7C15ULL * static_cast<uint64_t>(replicate + 1)));
  h = splitmix64(h ^ (0xC2B2AE3D27D4EB4FULL * static_cast<uint64_t>(agent + 1)));
  std::mt19937_64 rng;
  rng.seed(h);
  return rng;
}

void check_common(const GameSpec& game, const SimParams& params) {
  game.validate();
  if (params.steps <= 0) throw ConfigError("steps must be positive");
  if (!(params.epsilon > 0.0 && params.epsilon < 1.0))
    throw ConfigError("epsilon must lie in (0,1)");
  if (params.replicates <= 0) throw ConfigError("replicates must be positive");
  if (!(params.burn_in >= 0.0 && params.burn_in < 1.0))
    throw ConfigError("burn_in must lie in [0,1)");
  if (params.trace_stride < 0) throw ConfigError("trace_stride must be nonnegative");
}

GlobalState initial_state(const GameSpec& game, const SimParams& params) {
  if (!params.initial) return GlobalState::all_discontent(game.agents);
  GlobalState x = *params.initial;
  if (static_cast<int>(x.agents.size()) != game.agents)
    throw ConfigError("initial state has the wrong number of agents");
  for (int i = 0; i < game.agents; ++i) {
    const AgentState& s = x.agents[i];
    if (s.mood != Mood::kDiscontent && (s.action < 0 || s.action >= game.actions[i]))
      throw ConfigError("initial state has an out-of-range benchmark action");
  }
  x.canonicalize();
  return x;
}

// Occupancy bookkeeping shared by all homogeneous runs.
struct Tally {
  int64_t steps = 0;
  int64_t burn_start = 0;
  int stride = 0;
  std::map<GlobalState, int64_t> raw;
  std::map<GlobalState, int64_t> burned;
  std::vector<GlobalState> trace;

  Tally(int64_t total, double burn_in, int trace_stride)
      : steps(total),
        burn_start(static_cast<int64_t>(static_cast<double>(total) * burn_in)),
        stride(trace_stride) {}

  void count(const GlobalState& x, int64_t k) {
    raw[x] += 1;
    if (k >= burn_start) burned[x] += 1;
    if (stride > 0 && k % stride == 0) trace.push_back(x);
  }
  void count_rest(const GlobalState& x, int64_t k) {
    raw[x] += steps - k;
    burned[x] += steps - std::max(k, burn_start);
  }
  void finish(ReplicateResult& out) const {
    for (const auto& [s, c] : raw)
      out.occupancy[s] = static_cast<double>(c) / static_cast<double>(steps);
    const int64_t kept = steps - burn_start;
    for (const auto& [s, c] : burned)
      out.occupancy_burned[s] = static_cast<double>(c) / static_cast<double>(kept);
    out.trace = trace;
  }
};

// A state is absorbing for the trial-and-error variants when every agent is
// content at the optimal benchmark and the benchmark profile really delivers
// it; exploration probability is then exactly zero.
bool absorbing_det(const GameSpec& game, const PolicyContext& ctx, const GlobalState& x) {
  if (!x.all_content()) return false;
  for (const AgentState& s : x.agents)
    if (!ctx.optimal_benchmark(s.value)) return false;
  const ActionProfile a = x.benchmark_profile();
  for (int i = 0; i < game.agents; ++i)
    if (game.mean(i, a) != x.agents[i].value) return false;
  return true;
}

GlobalState step_det(const GameSpec& game, const PolicyContext& ctx, const GlobalState& x,
                     double eps, std::vector<std::mt19937_64>& rngs) {
  const int n = game.agents;
  ActionProfile a(n);
  for (int i = 0; i < n; ++i)
    a[i] = sample_action(x.agents[i], game.actions[i], ctx, eps, rngs[i]);
  GlobalState y;
  y.agents.resize(n);
  for (int i = 0; i < n; ++i)
    y.agents[i] = sample_update(x.agents[i], a[i], game.mean(i, a), ctx, eps, rngs[i]);
  y.canonicalize();
  return y;
}

template <typename Result, typename Fn>
void run_replicates(int replicates, std::vector<Result>& results, Fn&& one) {
  results.resize(replicates);
  const int workers = worker_count(replicates);
  if (workers <= 1) {
    for (int r = 0; r < replicates; ++r) results[r] = one(r);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int r = next.fetch_add(1);
        if (r >= replicates) return;
        try {
          results[r] = one(r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

RunReport run_trial_and_error(const GameSpec& game, const SimParams& params,
                              const ResistanceFunctions& rf, Algo algo) {
  check_common(game, params);
  if (!game.deterministic())
    throw AssumptionError("trial-and-error variants require deterministic utilities");
  rf.validate_for_agents(game.agents);
  if (algo == Algo::kIodl)
    for (int i = 0; i < game.agents; ++i) rf.validate_memoryless(game.agents, game.observable_values(i));

  const GlobalState start = initial_state(game, params);
  const PolicyContext ctx{algo, &rf, 0};

  RunReport report;
  report.algo = algo;
  report.params = params;
  run_replicates(params.replicates, report.replicates, [&](int r) {
    std::vector<std::mt19937_64> rngs;
    rngs.reserve(game.agents);
    for (int i = 0; i < game.agents; ++i) rngs.push_back(agent_stream(params.seed, r, i));

    ReplicateResult out;
    out.index = r;
    Tally tally(params.steps, params.burn_in, params.trace_stride);
    GlobalState x = start;
    for (int64_t k = 0; k < params.steps; ++k) {
      if (!out.absorption && absorbing_det(game, ctx, x)) {
        out.absorption = {k, x};
        tally.count_rest(x, k);
        break;
      }
      tally.count(x, k);
      x = step_det(game, ctx, x, params.epsilon, rngs);
    }
    tally.finish(out);
    out.final_state = x;
    return out;
  });
  return report;
}

// Per (agent, profile) utility sampler with exact bin assignment when the atom
// values share a small common denominator.
struct PeriodSampler {
  bool deterministic = false;
  int det_bin = 0;
  std::vector<double> cum;      // cumulative atom weights
  std::vector<int64_t> numer;   // atom values scaled by denom
  std::vector<double> values;   // atom values (fallback path)
  int64_t denom = 0;            // 0 selects the floating accumulator
};

PeriodSampler make_sampler(const UtilityModel& u, const QuantizationParams& quant, int64_t tau) {
  PeriodSampler s;
  if (u.is_deterministic()) {
    s.deterministic = true;
    s.det_bin = quant.bin_of(u.atoms.front().first);
    return s;
  }
  int64_t lcm = 1;
  bool on_grid = true;
  for (const auto& [value, weight] : u.atoms) {
    const int64_t d = value.den();
    const int64_t g = std::gcd(lcm, d);
    if (lcm / g > (int64_t{1} << 40) / d) { on_grid = false; break; }
    lcm = lcm / g * d;
  }
  // S*q with S <= tau*lcm must stay within int64.
  if (on_grid && tau * lcm <= (int64_t{1} << 56) / quant.q) {
    s.denom = lcm;
    for (const auto& [value, weight] : u.atoms)
      s.numer.push_back(value.num() * (lcm / value.den()));
  } else {
    for (const auto& [value, weight] : u.atoms) s.values.push_back(value.to_double());
  }
  double acc = 0;
  for (const auto& [value, weight] : u.atoms) {
    acc += weight.to_double();
    s.cum.push_back(acc);
  }
  s.cum.back() = 1.0;
  return s;
}

int draw_atom(const PeriodSampler& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  const auto it = std::upper_bound(s.cum.begin(), s.cum.end(), u);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - s.cum.begin(),
                                                   static_cast<std::ptrdiff_t>(s.cum.size()) - 1));
}

int observe_period(const PeriodSampler& s, const QuantizationParams& quant, int64_t tau,
                   std::mt19937_64& rng) {
  if (s.deterministic) return s.det_bin;
  if (s.denom > 0) {
    int64_t sum = 0;
    for (int64_t t = 0; t < tau; ++t) sum += s.numer[draw_atom(s, rng)];
    const int64_t total = tau * s.denom;
    if (sum == total) return quant.top_bin();
    return static_cast<int>((sum * quant.q) / total);
  }
  double sum = 0;
  for (int64_t t = 0; t < tau; ++t) sum += s.values[draw_atom(s, rng)];
  const double mean = sum / static_cast<double>(tau);
  if (mean >= 1.0) return quant.top_bin();
  return std::min<int>(static_cast<int>(mean * static_cast<double>(quant.q)), quant.top_bin() - 1);
}

}  // namespace

Schedule Schedule::constant(double eps) {
  Schedule s;
  s.kind = Kind::kConstant;
  s.constant_eps = eps;
  return s;
}

Schedule Schedule::polynomial(double k0, double gamma) {
  Schedule s;
  s.kind = Kind::kPolynomial;
  s.k0 = k0;
  s.gamma = gamma;
  return s;
}

Schedule Schedule::exponential(double eps0, double rate) {
  Schedule s;
  s.kind = Kind::kExponential;
  s.eps0 = eps0;
  s.rate = rate;
  return s;
}

Schedule Schedule::from_table(std::vector<double> values) {
  Schedule s;
  s.kind = Kind::kTable;
  s.table = std::move(values);
  return s;
}

double Schedule::at(int64_t k) const {
  switch (kind) {
    case Kind::kConstant:
      return constant_eps;
    case Kind::kPolynomial:
      return std::pow(static_cast<double>(k) + k0, -1.0 / gamma);
    case Kind::kExponential:
      return eps0 * std::pow(rate, static_cast<double>(k));
    case Kind::kTable:
      if (table.empty()) throw ConfigError("table schedule has no values");
      return table[std::min<int64_t>(k, static_cast<int64_t>(table.size()) - 1)];
  }
  throw ConfigError("unknown schedule kind");
}

void Schedule::validate(int64_t horizon) const {
  if (horizon <= 0) throw ConfigError("horizon must be positive");
  switch (kind) {
    case Kind::kConstant:
      if (!(constant_eps > 0 && constant_eps < 1))
        throw ConfigError("schedule epsilon must lie in (0,1)");
      return;
    case Kind::kPolynomial:
      if (!(gamma > 0)) throw ConfigError("schedule gamma must be positive");
      if (!(k0 > 1)) throw ConfigError("schedule k0 must exceed 1 so epsilon starts below 1");
      return;
    case Kind::kExponential:
      if (!(eps0 > 0 && eps0 < 1)) throw ConfigError("schedule eps0 must lie in (0,1)");
      if (!(rate > 0 && rate <= 1)) throw ConfigError("schedule rate must lie in (0,1]");
      return;
    case Kind::kTable: {
      if (table.empty()) throw ConfigError("table schedule has no values");
      double prev = 1.0;
      for (double v : table) {
        if (!(v > 0 && v < 1)) throw ConfigError("schedule values must lie in (0,1)");
        if (v > prev) throw ConfigError("schedule values must be non-increasing");
        prev = v;
      }
      return;
    }
  }
  throw ConfigError("unknown schedule kind");
}

std::string Schedule::str() const {
  switch (kind) {
    case Kind::kConstant:
      return "constant(" + std::to_string(constant_eps) + ")";
    case Kind::kPolynomial:
      return "polynomial(k0=" + std::to_string(k0) + ",gamma=" + std::to_string(gamma) + ")";
    case Kind::kExponential:
      return "exponential(eps0=" + std::to_string(eps0) + ",rate=" + std::to_string(rate) + ")";
    case Kind::kTable:
      return "table(" + std::to_string(table.size()) + " values)";
  }
  return "unknown";
}

std::map<GlobalState, double> RunReport::mean_occupancy(bool burned) const {
  std::map<GlobalState, double> out;
  if (replicates.empty()) return out;
  for (const ReplicateResult& r : replicates)
    for (const auto& [s, p] : (burned ? r.occupancy_burned : r.occupancy)) out[s] += p;
  for (auto& [s, p] : out) p /= static_cast<double>(replicates.size());
  return out;
}

RunReport run_itel(const GameSpec& game, const SimParams& params, const ResistanceFunctions& rf) {
  return run_trial_and_error(game, params, rf, Algo::kItel);
}

RunReport run_iodl(const GameSpec& game, const SimParams& params, const ResistanceFunctions& rf) {
  return run_trial_and_error(game, params, rf, Algo::kIodl);
}

RunReport run_ritel(const GameSpec& game, const SimParams& params, const ResistanceFunctions& rf) {
  check_common(game, params);
  if (params.quant.q <= 0) throw ConfigError("quantization requires a positive bin count");
  if (!(params.tau0 > 0)) throw ConfigError("tau0 must be positive");
  if (params.strict) {
    const double r0 = 2.0 * params.tau0 / (static_cast<double>(params.quant.q) *
                                           static_cast<double>(params.quant.q));
    if (r0 < 1.0 - 1e-12)
      throw AssumptionError("noise control requires 2*tau0*delta^2 >= 1");
  }
  rf.validate_for_agents(game.agents);

  const int64_t tau = rounds_per_period(params.tau0, params.epsilon);
  const GlobalState start = initial_state(game, params);
  const PolicyContext ctx{Algo::kRitel, &rf, params.quant.top_bin()};

  std::vector<std::vector<PeriodSampler>> samplers(game.agents);
  for (int i = 0; i < game.agents; ++i) {
    samplers[i].reserve(game.profile_count());
    for (int p = 0; p < game.profile_count(); ++p)
      samplers[i].push_back(make_sampler(game.utilities[i][p], params.quant, tau));
  }

  RunReport report;
  report.algo = Algo::kRitel;
  report.params = params;
  run_replicates(params.replicates, report.replicates, [&](int r) {
    std::vector<std::mt19937_64> rngs;
    rngs.reserve(game.agents);
    for (int i = 0; i < game.agents; ++i) rngs.push_back(agent_stream(params.seed, r, i));

    ReplicateResult out;
    out.index = r;
    Tally tally(params.steps, params.burn_in, params.trace_stride);
    GlobalState x = start;
    ActionProfile a(game.agents);
    for (int64_t k = 0; k < params.steps; ++k) {
      tally.count(x, k);
      for (int i = 0; i < game.agents; ++i)
        a[i] = sample_action(x.agents[i], game.actions[i], ctx, params.epsilon, rngs[i]);
      const int pidx = game.profile_index(a);
      GlobalState y;
      y.agents.resize(game.agents);
      for (int i = 0; i < game.agents; ++i) {
        const int bin = observe_period(samplers[i][pidx], params.quant, tau, rngs[i]);
        y.agents[i] =
            sample_update(x.agents[i], a[i], Rational(bin), ctx, params.epsilon, rngs[i]);
      }
      y.canonicalize();
      x = y;
    }
    tally.finish(out);
    out.final_state = x;
    return out;
  });
  return report;
}

CooledReport run_cooled(const GameSpec& game, Algo algo, const Schedule& schedule,
                        const ResistanceFunctions& rf, int64_t horizon, int replicates,
                        uint64_t seed, int checkpoint_count) {
  if (algo != Algo::kItel && algo != Algo::kIodl)
    throw ConfigError("cooled runs support the trial-and-error variants only");
  game.validate();
  if (!game.deterministic())
    throw AssumptionError("trial-and-error variants require deterministic utilities");
  schedule.validate(horizon);
  if (replicates <= 0) throw ConfigError("replicates must be positive");
  if (checkpoint_count <= 0) throw ConfigError("checkpoint_count must be positive");
  rf.validate_for_agents(game.agents);
  if (algo == Algo::kIodl)
    for (int i = 0; i < game.agents; ++i) rf.validate_memoryless(game.agents, game.observable_values(i));

  CooledReport report;
  report.algo = algo;
  report.schedule = schedule;
  report.horizon = horizon;
  report.seed = seed;
  for (int i = 1; i <= checkpoint_count; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(checkpoint_count);
    int64_t c = static_cast<int64_t>(std::llround(std::pow(static_cast<double>(horizon), f)));
    c = std::max<int64_t>(1, std::min(c, horizon));
    if (report.checkpoints.empty() || c > report.checkpoints.back())
      report.checkpoints.push_back(c);
  }
  if (report.checkpoints.back() != horizon) report.checkpoints.push_back(horizon);

  const PolicyContext ctx{algo, &rf, 0};
  const GlobalState start = GlobalState::all_discontent(game.agents);
  const int ckpts = static_cast<int>(report.checkpoints.size());
  report.state_at.assign(ckpts, std::vector<GlobalState>(replicates));

  std::vector<std::vector<GlobalState>> per_replicate;
  run_replicates(replicates, per_replicate, [&](int r) {
    std::vector<std::mt19937_64> rngs;
    rngs.reserve(game.agents);
    for (int i = 0; i < game.agents; ++i) rngs.push_back(agent_stream(seed, r, i));

    std::vector<GlobalState> at(ckpts);
    GlobalState x = start;
    int next = 0;
    for (int64_t k = 0; k < horizon && next < ckpts; ++k) {
      if (absorbing_det(game, ctx, x)) break;
      x = step_det(game, ctx, x, schedule.at(k), rngs);
      while (next < ckpts && report.checkpoints[next] == k + 1) {
        at[next] = x;
        ++next;
      }
    }
    for (; next < ckpts; ++next) at[next] = x;
    return at;
  });
  for (int c = 0; c < ckpts; ++c)
    for (int r = 0; r < replicates; ++r) report.state_at[c][r] = per_replicate[r][c];
  return report;
}

int worker_count(int replicates) {
  int cap = static_cast<int>(std::thread::hardware_concurrency());
  if (cap <= 0) cap = 1;
  if (const char* env = std::getenv("PDL_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) cap = v;
  }
  return std::max(1, std::min(cap, replicates));
}

}  // namespace pdl
