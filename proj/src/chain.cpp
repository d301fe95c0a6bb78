#include "pdl/chain.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <string>

#include "pdl/errors.hpp"
#include "pdl/large_deviations.hpp"

namespace pdl {

namespace {

// Joint outcomes of a state: cartesian product of per-agent action choices,
// then of per-agent updates under the resulting deterministic utilities.
std::map<GlobalState, EpsPoly> symbolic_row(const GameSpec& game, const PolicyContext& ctx,
                                            const GlobalState& s) {
  const int n = game.agents;
  std::vector<std::vector<std::pair<int, EpsPoly>>> acts(n);
  for (int i = 0; i < n; ++i) acts[i] = action_distribution(s.agents[i], game.actions[i], ctx);

  std::map<GlobalState, EpsPoly> acc;
  std::vector<std::size_t> ai(n, 0);
  while (true) {
    ActionProfile a(n);
    EpsPoly p_act = EpsPoly::one();
    for (int i = 0; i < n; ++i) {
      a[i] = acts[i][ai[i]].first;
      p_act *= acts[i][ai[i]].second;
    }

    std::vector<std::vector<std::pair<AgentState, EpsPoly>>> ups(n);
    for (int i = 0; i < n; ++i) {
      const UtilityModel& u = game.utility(i, a);
      ups[i] = update_distribution(s.agents[i], a[i], u.atoms.front().first, ctx);
    }
    std::vector<std::size_t> ui(n, 0);
    while (true) {
      GlobalState target;
      target.agents.resize(n);
      EpsPoly p = p_act;
      for (int i = 0; i < n; ++i) {
        target.agents[i] = ups[i][ui[i]].first;
        p *= ups[i][ui[i]].second;
      }
      if (!p.is_zero()) {
        target.canonicalize();
        acc[target] += p;
      }
      int j = n - 1;
      while (j >= 0 && ++ui[j] == ups[j].size()) ui[j--] = 0;
      if (j < 0) break;
    }

    int j = n - 1;
    while (j >= 0 && ++ai[j] == acts[j].size()) ai[j--] = 0;
    if (j < 0) break;
  }
  return acc;
}

void check_symbolic_row(const std::map<GlobalState, EpsPoly>& row, const std::string& where) {
  EpsPoly sum;
  for (const auto& [target, p] : row) {
    if (!p.leading_coefficient_positive())
      throw ConsistencyError("leading-term cancellation in transition " + where + ": " + p.str());
    sum += p;
  }
  if (!sum.is_one())
    throw ConsistencyError("row does not sum to 1 at " + where + ": " + sum.str());
  for (double eps : {0.3, 0.1, 0.01}) {
    double total = 0;
    for (const auto& [target, p] : row) {
      const double v = p.eval(eps);
      if (v < -1e-12 || v > 1 + 1e-12)
        throw ConsistencyError("transition mass outside [0,1] at " + where);
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-10)
      throw ConsistencyError("numeric row sum off at " + where);
  }
}

}  // namespace

int PMPChain::state_index(const GlobalState& s) const {
  const auto it = index.find(s);
  return it == index.end() ? -1 : it->second;
}

PMPChain build_chain(const GameSpec& game, Algo algo, const ResistanceFunctions& rf,
                     std::size_t cap) {
  game.validate();
  if (algo == Algo::kRitel)
    throw ConfigError("symbolic chains cover the trial-and-error variants only");
  if (!game.deterministic())
    throw AssumptionError("symbolic chain needs deterministic utilities");
  rf.validate_for_agents(game.agents);
  if (algo == Algo::kIodl) {
    for (int i = 0; i < game.agents; ++i)
      rf.validate_memoryless(game.agents, game.observable_values(i));
  }

  PMPChain chain;
  chain.game = game;
  chain.algo = algo;
  chain.rf = rf;
  const PolicyContext ctx = chain.context();

  const GlobalState d = GlobalState::all_discontent(game.agents);
  chain.states.push_back(d);
  chain.index.emplace(d, 0);
  chain.d_index = 0;

  std::deque<int> frontier{0};
  while (!frontier.empty()) {
    const int si = frontier.front();
    frontier.pop_front();
    const GlobalState state = chain.states[si];  // copy: states vector grows below
    auto row = symbolic_row(game, ctx, state);
    check_symbolic_row(row, state_label(state, algo));

    std::vector<std::pair<int, EpsPoly>> out;
    out.reserve(row.size());
    for (auto& [target, p] : row) {
      int ti = chain.state_index(target);
      if (ti < 0) {
        if (chain.states.size() >= cap)
          throw SizeError("state enumeration exceeded cap of " + std::to_string(cap) +
                              " states",
                          cap);
        ti = static_cast<int>(chain.states.size());
        chain.states.push_back(target);
        chain.index.emplace(target, ti);
        frontier.push_back(ti);
      }
      out.emplace_back(ti, std::move(p));
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (static_cast<std::size_t>(si) >= chain.rows.size()) chain.rows.resize(si + 1);
    chain.rows[si] = std::move(out);
  }
  chain.rows.resize(chain.states.size());
  return chain;
}

std::vector<GlobalState> enumerate_states(const GameSpec& game, Algo algo,
                                          const ResistanceFunctions& rf, std::size_t cap) {
  return build_chain(game, algo, rf, cap).states;
}

std::vector<std::pair<int, EpsPoly>> build_transition_row(const PMPChain& chain, int state) {
  const auto row = symbolic_row(chain.game, chain.context(), chain.states.at(state));
  std::vector<std::pair<int, EpsPoly>> out;
  for (const auto& [target, p] : row) {
    const int ti = chain.state_index(target);
    if (ti < 0) throw ConsistencyError("row target missing from enumerated states");
    out.emplace_back(ti, p);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

std::vector<std::vector<std::pair<int, double>>> unperturbed_limit(const PMPChain& chain) {
  std::vector<std::vector<std::pair<int, double>>> p0(chain.rows.size());
  for (std::size_t i = 0; i < chain.rows.size(); ++i) {
    Rational total(0);
    for (const auto& [ti, p] : chain.rows[i]) {
      const auto& terms = p.terms();
      if (!terms.empty() && terms.front().first.is_zero()) {
        p0[i].emplace_back(ti, terms.front().second.to_double());
        total += terms.front().second;
      }
    }
    if (total != Rational(1))
      throw ConsistencyError("limit row not stochastic at state " +
                             state_label(chain.states[i], chain.algo));
  }
  return p0;
}

int NumericChain::state_index(const GlobalState& s) const {
  const auto it = index.find(s);
  return it == index.end() ? -1 : it->second;
}

NumericChain build_ritel_numeric_chain(const GameSpec& game, const ResistanceFunctions& rf,
                                       const QuantizationParams& quant, double tau0, double eps,
                                       std::size_t cap) {
  game.validate();
  rf.validate_for_agents(game.agents);
  if (!(eps > 0 && eps < 1)) throw ConfigError("eps must lie in (0,1)");

  NumericChain chain;
  chain.game = game;
  chain.rf = rf;
  chain.quant = quant;
  chain.eps = eps;
  chain.tau = rounds_per_period(tau0, eps);
  const PolicyContext ctx = chain.context();

  // Period-sampling tails per (agent, profile); utilities are immutable.
  const int profiles = game.profile_count();
  std::vector<std::vector<TailResult>> tails(game.agents, std::vector<TailResult>(profiles));
  for (int i = 0; i < game.agents; ++i) {
    for (int p = 0; p < profiles; ++p) {
      const UtilityModel& u = game.utilities[i][p];
      if (u.is_deterministic()) {
        TailResult t;
        t.bin_prob.assign(quant.top_bin() + 1, 0.0);
        t.log_bin_prob.assign(quant.top_bin() + 1, -std::numeric_limits<double>::infinity());
        const int b = quant.bin_of(u.atoms.front().first);
        t.bin_prob[b] = 1.0;
        t.log_bin_prob[b] = 0.0;
        tails[i][p] = std::move(t);
      } else {
        tails[i][p] = observation_tail(u, quant, chain.tau,
                                       0x5851f42d4c957f2dULL ^ (uint64_t(i) << 32) ^ uint64_t(p));
        if (!tails[i][p].exact) {
          chain.tails_exact = false;
          chain.max_mc_half_width = std::max(chain.max_mc_half_width, tails[i][p].mc_half_width);
        }
      }
    }
  }

  const GlobalState d = GlobalState::all_discontent(game.agents);
  chain.states.push_back(d);
  chain.index.emplace(d, 0);
  chain.d_index = 0;

  std::deque<int> frontier{0};
  while (!frontier.empty()) {
    const int si = frontier.front();
    frontier.pop_front();
    const GlobalState state = chain.states[si];

    const int n = game.agents;
    std::vector<std::vector<std::pair<int, double>>> acts(n);
    for (int i = 0; i < n; ++i) {
      for (const auto& [a, poly] : action_distribution(state.agents[i], game.actions[i], ctx)) {
        const double pr = poly.eval(eps);
        if (pr > 0) acts[i].push_back({a, pr});
      }
    }

    std::map<GlobalState, double> acc;
    std::vector<std::size_t> ai(n, 0);
    while (true) {
      ActionProfile a(n);
      double p_act = 1;
      for (int i = 0; i < n; ++i) {
        a[i] = acts[i][ai[i]].first;
        p_act *= acts[i][ai[i]].second;
      }
      const int pidx = game.profile_index(a);

      // Successor distribution per agent: tail-weighted mixture of updates.
      std::vector<std::vector<std::pair<AgentState, double>>> ups(n);
      for (int i = 0; i < n; ++i) {
        std::map<AgentState, double> m;
        const TailResult& tail = tails[i][pidx];
        for (int b = 0; b <= quant.top_bin(); ++b) {
          const double pb = tail.bin_prob[b];
          if (pb <= 0) continue;
          for (const auto& [next, poly] : update_distribution(state.agents[i], a[i], Rational(b), ctx)) {
            const double pr = poly.eval(eps);
            if (pr > 0) m[next] += pb * pr;
          }
        }
        ups[i].assign(m.begin(), m.end());
      }

      std::vector<std::size_t> ui(n, 0);
      while (true) {
        GlobalState target;
        target.agents.resize(n);
        double p = p_act;
        for (int i = 0; i < n; ++i) {
          target.agents[i] = ups[i][ui[i]].first;
          p *= ups[i][ui[i]].second;
        }
        if (p > 0) {
          target.canonicalize();
          acc[target] += p;
        }
        int j = n - 1;
        while (j >= 0 && ++ui[j] == ups[j].size()) ui[j--] = 0;
        if (j < 0) break;
      }

      int j = n - 1;
      while (j >= 0 && ++ai[j] == acts[j].size()) ai[j--] = 0;
      if (j < 0) break;
    }

    double total = 0;
    std::vector<std::pair<int, double>> out;
    out.reserve(acc.size());
    for (const auto& [target, p] : acc) {
      total += p;
      int ti = chain.state_index(target);
      if (ti < 0) {
        if (chain.states.size() >= cap)
          throw SizeError("state enumeration exceeded cap of " + std::to_string(cap) +
                              " states",
                          cap);
        ti = static_cast<int>(chain.states.size());
        chain.states.push_back(target);
        chain.index.emplace(target, ti);
        frontier.push_back(ti);
      }
      out.emplace_back(ti, p);
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw ConsistencyError("numeric row sum off at " +
                             state_label(state, Algo::kRitel) + ": " + std::to_string(total));
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (static_cast<std::size_t>(si) >= chain.rows.size()) chain.rows.resize(si + 1);
    chain.rows[si] = std::move(out);
  }
  chain.rows.resize(chain.states.size());
  return chain;
}

}  // namespace pdl
