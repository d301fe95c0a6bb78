#include "pdl/policy.hpp"

#include "pdl/errors.hpp"

namespace pdl {

std::string algo_name(Algo a) {
  switch (a) {
    case Algo::kItel: return "itel";
    case Algo::kIodl: return "iodl";
    case Algo::kRitel: return "ritel";
  }
  throw ConsistencyError("bad algo");
}

Algo algo_from_name(const std::string& name) {
  if (name == "itel") return Algo::kItel;
  if (name == "iodl") return Algo::kIodl;
  if (name == "ritel") return Algo::kRitel;
  throw ConfigError("unknown algorithm: " + name + " (expected itel|iodl|ritel)");
}

char mood_char(Mood m) {
  switch (m) {
    case Mood::kContent: return 'C';
    case Mood::kDiscontent: return 'D';
    case Mood::kHopeful: return 'H';
    case Mood::kWatchful: return 'W';
  }
  throw ConsistencyError("bad mood");
}

bool operator<(const AgentState& a, const AgentState& b) {
  if (a.mood != b.mood) return static_cast<int>(a.mood) < static_cast<int>(b.mood);
  if (a.action != b.action) return a.action < b.action;
  return a.value < b.value;
}

ActionProfile GlobalState::benchmark_profile() const {
  ActionProfile p;
  p.reserve(agents.size());
  for (const AgentState& s : agents) {
    if (s.mood == Mood::kDiscontent)
      throw ConsistencyError("benchmark profile of a state with a discontent agent");
    p.push_back(s.action);
  }
  return p;
}

std::size_t GlobalStateHash::operator()(const GlobalState& s) const {
  std::size_t h = 0x811c9dc5ULL;
  auto mix = [&h](std::size_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  for (const AgentState& a : s.agents) {
    mix(static_cast<std::size_t>(a.mood));
    mix(static_cast<std::size_t>(a.action) + 7);
    mix(RationalHash()(a.value));
  }
  return h;
}

std::string state_label(const GlobalState& s, Algo algo) {
  std::string out;
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    if (i) out += "|";
    const AgentState& a = s.agents[i];
    if (a.mood == Mood::kDiscontent) {
      out += "D";
      continue;
    }
    out += mood_char(a.mood);
    out += " a=" + std::to_string(a.action);
    out += (algo == Algo::kRitel ? " b=" : " u=") + a.value.str();
  }
  return out;
}

Rational PolicyContext::f_of(const Rational& value) const {
  if (algo == Algo::kRitel) return rf->f(value * bin_width());
  return rf->f(value);
}

Rational PolicyContext::g_of(const Rational& bench, const Rational& observed) const {
  if (algo == Algo::kRitel) return rf->g(bench * bin_width(), observed * bin_width());
  return rf->g(bench, observed);
}

std::vector<std::pair<int, EpsPoly>> action_distribution(const AgentState& s, int action_count,
                                                         const PolicyContext& ctx) {
  if (action_count < 1) throw ConsistencyError("action count must be positive");
  std::vector<std::pair<int, EpsPoly>> out;
  if (ctx.algo == Algo::kIodl && (s.mood == Mood::kHopeful || s.mood == Mood::kWatchful))
    throw ConsistencyError("memoryless variant has no hopeful/watchful moods");

  if (s.mood == Mood::kDiscontent) {
    EpsPoly p = EpsPoly::constant(Rational(1, action_count));
    for (int a = 0; a < action_count; ++a) out.push_back({a, p});
    return out;
  }
  bool explores = s.mood == Mood::kContent && !ctx.optimal_benchmark(s.value) && action_count > 1;
  if (!explores) {
    out.push_back({s.action, EpsPoly::one()});
    return out;
  }
  out.push_back({s.action, EpsPoly::one_minus_power(Rational(1))});
  EpsPoly each = EpsPoly::power(Rational(1)).scaled(Rational(1, action_count - 1));
  for (int a = 0; a < action_count; ++a)
    if (a != s.action) out.push_back({a, each});
  return out;
}

namespace {

// Accept with the resisted probability eps^r (capped by the constant c_F when
// r == 0), otherwise reject into discontent.
void discontent_rows(const AgentState& /*s*/, int action, const Rational& observed,
                     const PolicyContext& ctx, std::vector<std::pair<AgentState, EpsPoly>>& out) {
  Rational r = ctx.f_of(observed);
  if (r < Rational(0)) throw ConsistencyError("negative acceptance resistance");
  AgentState accept = AgentState::content(action, observed);
  if (r.is_zero()) {
    out.push_back({accept, EpsPoly::constant(ctx.rf->c_f())});
    out.push_back({AgentState::discontent(), EpsPoly::constant(Rational(1) - ctx.rf->c_f())});
  } else {
    out.push_back({accept, EpsPoly::power(r)});
    out.push_back({AgentState::discontent(), EpsPoly::one_minus_power(r)});
  }
}

void push(std::vector<std::pair<AgentState, EpsPoly>>& out, AgentState st, EpsPoly p) {
  st.canonicalize();
  if (p.is_zero()) return;
  for (auto& [existing, poly] : out)
    if (existing == st) { poly += p; return; }
  out.push_back({std::move(st), std::move(p)});
}

}  // namespace

std::vector<std::pair<AgentState, EpsPoly>> update_distribution(const AgentState& s, int action,
                                                                const Rational& observed,
                                                                const PolicyContext& ctx) {
  if (ctx.algo == Algo::kRitel) {
    if (!observed.is_integer() || observed < Rational(0) || observed > Rational(ctx.top_bin))
      throw ConsistencyError("observed bin out of range: " + observed.str());
  } else if (observed < Rational(0) || observed > Rational(1)) {
    throw ConsistencyError("observed utility out of range: " + observed.str());
  }

  if (ctx.algo == Algo::kIodl && (s.mood == Mood::kHopeful || s.mood == Mood::kWatchful))
    throw ConsistencyError("memoryless variant has no hopeful/watchful moods");

  std::vector<std::pair<AgentState, EpsPoly>> out;
  const AgentState revert = s.mood == Mood::kDiscontent
                                ? AgentState::discontent()
                                : AgentState::content(s.action, s.value);

  if (s.mood == Mood::kDiscontent) {
    discontent_rows(s, action, observed, ctx, out);
    return out;
  }

  // Comparison of the observation against the benchmark. The quantized
  // variant treats a one-bin gap as equal (hysteresis band): "above" means
  // at least two bins up, "below" at least two bins down.
  int cmp;
  if (ctx.algo == Algo::kRitel) {
    Rational d = observed - s.value;
    cmp = d > Rational(1) ? 1 : (d < Rational(-1) ? -1 : 0);
  } else {
    cmp = observed > s.value ? 1 : (observed < s.value ? -1 : 0);
  }

  if (s.mood == Mood::kContent) {
    if (action != s.action) {
      // Exploration outcome: adopt a strict improvement against the resisted
      // probability eps^G, otherwise return to the benchmark.
      if (cmp > 0) {
        Rational r = ctx.g_of(s.value, observed);
        if (r < Rational(0)) throw ConsistencyError("negative exploration resistance");
        push(out, AgentState::content(action, observed), EpsPoly::power(r));
        push(out, revert, EpsPoly::one_minus_power(r));
      } else {
        push(out, revert, EpsPoly::one());
      }
      return out;
    }
    if (cmp > 0) {
      if (ctx.algo == Algo::kIodl)
        push(out, AgentState::content(action, observed), EpsPoly::one());
      else
        push(out, AgentState{Mood::kHopeful, s.action, s.value}, EpsPoly::one());
    } else if (cmp == 0) {
      push(out, revert, EpsPoly::one());
    } else {
      if (ctx.algo == Algo::kIodl)
        push(out, AgentState::discontent(), EpsPoly::one());
      else
        push(out, AgentState{Mood::kWatchful, s.action, s.value}, EpsPoly::one());
    }
    return out;
  }

  if (s.mood == Mood::kHopeful) {
    if (cmp > 0) push(out, AgentState::content(action, observed), EpsPoly::one());
    else if (cmp == 0) push(out, revert, EpsPoly::one());
    else push(out, AgentState{Mood::kWatchful, s.action, s.value}, EpsPoly::one());
    return out;
  }

  // Watchful: recover on improvement, reject on a second drop.
  if (cmp > 0) push(out, AgentState{Mood::kHopeful, s.action, s.value}, EpsPoly::one());
  else if (cmp == 0) push(out, revert, EpsPoly::one());
  else push(out, AgentState::discontent(), EpsPoly::one());
  return out;
}

int sample_action(const AgentState& s, int action_count, const PolicyContext& ctx, double eps,
                  std::mt19937_64& rng) {
  auto dist = action_distribution(s, action_count, ctx);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  double acc = 0.0;
  for (const auto& [a, p] : dist) {
    acc += p.eval(eps);
    if (u < acc) return a;
  }
  return dist.back().first;
}

AgentState sample_update(const AgentState& s, int action, const Rational& observed,
                         const PolicyContext& ctx, double eps, std::mt19937_64& rng) {
  auto dist = update_distribution(s, action, observed, ctx);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  double acc = 0.0;
  for (const auto& [st, p] : dist) {
    acc += p.eval(eps);
    if (u < acc) return st;
  }
  return dist.back().first;
}

}  // namespace pdl
