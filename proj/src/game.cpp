#include "pdl/game.hpp"

#include <algorithm>

#include "pdl/errors.hpp"

namespace pdl {

UtilityModel UtilityModel::deterministic(const Rational& v) {
  UtilityModel m;
  m.atoms = {{v, Rational(1)}};
  m.declared_deterministic = true;
  return m;
}

UtilityModel UtilityModel::finite_support(std::vector<std::pair<Rational, Rational>> atoms) {
  if (atoms.empty()) throw ConfigError("utility support must be nonempty");
  std::sort(atoms.begin(), atoms.end());
  std::vector<std::pair<Rational, Rational>> merged;
  for (const auto& [v, w] : atoms) {
    if (w <= Rational(0)) throw ConfigError("utility weights must be positive");
    if (!merged.empty() && merged.back().first == v) merged.back().second += w;
    else merged.push_back({v, w});
  }
  Rational total(0);
  for (const auto& [v, w] : merged) total += w;
  if (std::abs(total.to_double() - 1.0) > 1e-12)
    throw ConfigError("utility weights must sum to 1, got " + total.str());
  if (total != Rational(1))
    for (auto& [v, w] : merged) w /= total;
  UtilityModel m;
  m.atoms = std::move(merged);
  m.declared_deterministic = false;
  return m;
}

Rational UtilityModel::mean() const {
  Rational s(0);
  for (const auto& [v, w] : atoms) s += v * w;
  return s;
}

Rational UtilityModel::variance() const {
  Rational mu = mean();
  Rational s(0);
  for (const auto& [v, w] : atoms) s += (v - mu) * (v - mu) * w;
  return s;
}

int GameSpec::profile_count() const {
  int c = 1;
  for (int m : actions) c *= m;
  return c;
}

int GameSpec::profile_index(const ActionProfile& a) const {
  int idx = 0;
  for (int i = 0; i < agents; ++i) {
    if (a[i] < 0 || a[i] >= actions[i]) throw ConsistencyError("action out of range");
    idx = idx * actions[i] + a[i];
  }
  return idx;
}

ActionProfile GameSpec::profile_at(int index) const {
  ActionProfile a(agents);
  for (int i = agents - 1; i >= 0; --i) {
    a[i] = index % actions[i];
    index /= actions[i];
  }
  return a;
}

const UtilityModel& GameSpec::utility(int agent, const ActionProfile& a) const {
  return utilities[agent][profile_index(a)];
}

Rational GameSpec::mean(int agent, const ActionProfile& a) const {
  return utility(agent, a).mean();
}

bool GameSpec::deterministic() const {
  for (const auto& row : utilities)
    for (const auto& m : row)
      if (!m.is_deterministic()) return false;
  return true;
}

std::vector<Rational> GameSpec::observable_values(int agent) const {
  std::vector<Rational> vals;
  for (const auto& m : utilities[agent])
    for (const auto& [v, w] : m.atoms) vals.push_back(v);
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  return vals;
}

std::vector<Rational> GameSpec::mean_values(int agent) const {
  std::vector<Rational> vals;
  for (const auto& m : utilities[agent]) vals.push_back(m.mean());
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  return vals;
}

void GameSpec::validate() const {
  if (agents < 1) throw ConfigError("game needs at least one agent");
  if (static_cast<int>(actions.size()) != agents)
    throw ConfigError("actions_per_agent length must equal agent count");
  for (int m : actions)
    if (m < 1) throw ConfigError("every agent needs at least one action");
  if (static_cast<int>(utilities.size()) != agents)
    throw ConfigError("utilities must have one row per agent");
  int pc = profile_count();
  for (const auto& row : utilities) {
    if (static_cast<int>(row.size()) != pc)
      throw ConfigError("utility row length must equal the profile count");
    for (const auto& m : row) {
      if (m.atoms.empty()) throw ConfigError("utility support must be nonempty");
      if (m.ess_min() < Rational(0) || m.ess_max() > Rational(1))
        throw ConfigError("utility values must lie in [0, 1]");
    }
  }
}

QuantizationParams QuantizationParams::from_delta(double delta) {
  if (!(delta > 0.0) || delta > 1.0) throw ConfigError("delta must lie in (0, 1]");
  double qd = 1.0 / delta;
  int64_t q = static_cast<int64_t>(std::llround(qd));
  if (q < 1 || std::abs(qd - static_cast<double>(q)) > 1e-9)
    throw ConfigError("1/delta must be an integer");
  return QuantizationParams{q};
}

QuantizationParams QuantizationParams::from_q(int64_t q) {
  if (q < 1) throw ConfigError("bins per unit must be positive");
  return QuantizationParams{q};
}

int QuantizationParams::bin_of(const Rational& u) const {
  if (u < Rational(0) || u > Rational(1))
    throw ConsistencyError("bin arithmetic out of range: " + u.str());
  if (u == Rational(1)) return top_bin();
  return static_cast<int>((u * Rational(q)).floor());
}

Rational mean_utility(const GameSpec& game, int agent, const ActionProfile& a) {
  return game.mean(agent, a);
}

namespace {

// Enumerate joint actions of the agents in `subset`, mutating `a` in place.
template <typename Fn>
bool for_each_joint_deviation(const GameSpec& game, ActionProfile& a,
                              const std::vector<int>& subset, std::size_t pos, Fn&& fn) {
  if (pos == subset.size()) return fn(const_cast<const ActionProfile&>(a));
  int agent = subset[pos];
  int saved = a[agent];
  for (int act = 0; act < game.actions[agent]; ++act) {
    a[agent] = act;
    if (for_each_joint_deviation(game, a, subset, pos + 1, fn)) {
      a[agent] = saved;
      return true;
    }
  }
  a[agent] = saved;
  return false;
}

std::optional<InterdependenceWitness> check_interdependence_impl(const GameSpec& game,
                                                                 const Rational& threshold,
                                                                 bool strict_nonzero) {
  int n = game.agents;
  if (n == 1) return std::nullopt;  // no proper nonempty subset: vacuously interdependent
  for (int p = 0; p < game.profile_count(); ++p) {
    ActionProfile base = game.profile_at(p);
    for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
      std::vector<int> subset;
      for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) subset.push_back(i);
      ActionProfile work = base;
      bool found = for_each_joint_deviation(
          game, work, subset, 0, [&](const ActionProfile& dev) {
            for (int i = 0; i < n; ++i) {
              if (mask & (1u << i)) continue;
              Rational diff = abs(game.mean(i, dev) - game.mean(i, base));
              if (strict_nonzero ? !diff.is_zero() : diff >= threshold) return true;
            }
            return false;
          });
      if (!found) return InterdependenceWitness{base, subset};
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<InterdependenceWitness> check_interdependence(const GameSpec& game) {
  return check_interdependence_impl(game, Rational(0), true);
}

std::optional<InterdependenceWitness> check_3delta_interdependence(const GameSpec& game,
                                                                   const Rational& delta) {
  if (delta.is_zero()) return check_interdependence(game);
  return check_interdependence_impl(game, Rational(3) * delta, false);
}

std::vector<ActionProfile> find_rho_equilibria(const GameSpec& game, const Rational& rho) {
  std::vector<ActionProfile> out;
  for (int p = 0; p < game.profile_count(); ++p) {
    ActionProfile a = game.profile_at(p);
    bool ok = true;
    for (int i = 0; i < game.agents && ok; ++i) {
      Rational mu = game.mean(i, a);
      ActionProfile dev = a;
      for (int act = 0; act < game.actions[i]; ++act) {
        if (act == a[i]) continue;
        dev[i] = act;
        if (game.mean(i, dev) > mu + rho) { ok = false; break; }
      }
    }
    if (ok) out.push_back(a);
  }
  return out;
}

Rational welfare(const GameSpec& game, const ActionProfile& a) {
  Rational s(0);
  for (int i = 0; i < game.agents; ++i) s += game.mean(i, a);
  return s;
}

std::optional<Rational> stability(const GameSpec& game, const ActionProfile& a) {
  std::optional<Rational> best;
  for (int i = 0; i < game.agents; ++i) {
    Rational mu = game.mean(i, a);
    ActionProfile dev = a;
    for (int act = 0; act < game.actions[i]; ++act) {
      if (act == a[i]) continue;
      dev[i] = act;
      Rational gain = game.mean(i, dev) - mu;
      if (gain > Rational(0) && (!best || gain > *best)) best = gain;
    }
  }
  return best;
}

Rational virtual_welfare_profile(const GameSpec& game, const ActionProfile& a,
                                 const ResistanceFunctions& rf, const Rational& delta, int sign) {
  Rational s(1);
  for (int i = 0; i < game.agents; ++i)
    s -= rf.f(game.mean(i, a) + Rational(sign) * delta);
  return s;
}

std::optional<Rational> virtual_stability_profile(const GameSpec& game, const ActionProfile& a,
                                                  const ResistanceFunctions& rf,
                                                  const Rational& delta, int sign) {
  if (sign != 1 && sign != -1) throw ConfigError("virtual stability sign must be +1 or -1");
  // Definedness gate: +1 needs a non-(delta)-equilibrium, -1 a non-(3 delta)-equilibrium.
  Rational gate = sign == 1 ? delta : Rational(3) * delta;
  std::optional<Rational> min_g;
  bool beyond_gate = false;
  for (int i = 0; i < game.agents; ++i) {
    Rational mu = game.mean(i, a);
    ActionProfile dev = a;
    for (int act = 0; act < game.actions[i]; ++act) {
      if (act == a[i]) continue;
      dev[i] = act;
      Rational m = game.mean(i, dev);
      if (m > mu + gate) beyond_gate = true;
      if (sign == 1) {
        if (m > mu) {
          Rational g = rf.g(mu - delta, m + delta);
          if (!min_g || g < *min_g) min_g = g;
        }
      } else {
        if (m > mu + Rational(3) * delta) {
          Rational g = rf.g(mu + delta, m - delta);
          if (!min_g || g < *min_g) min_g = g;
        }
      }
    }
  }
  if (!beyond_gate) return std::nullopt;
  return Rational(1) - *min_g;
}

ProfileStats compute_profile_stats(const GameSpec& game, const ActionProfile& a,
                                   const QuantizationParams& quant) {
  ProfileStats st;
  st.profile = a;
  for (int i = 0; i < game.agents; ++i) {
    st.means.push_back(game.mean(i, a));
    st.bins.push_back(quant.bin_of(st.means.back()));
  }
  st.welfare = welfare(game, a);
  st.stability = stability(game, a);
  return st;
}

namespace {

GameSpec matrix_game(const std::string& name, const std::vector<std::vector<double>>& u1,
                     const std::vector<std::vector<double>>& u2) {
  GameSpec g;
  g.name = name;
  g.agents = 2;
  g.actions = {static_cast<int>(u1.size()), static_cast<int>(u1[0].size())};
  g.utilities.resize(2);
  for (std::size_t a1 = 0; a1 < u1.size(); ++a1)
    for (std::size_t a2 = 0; a2 < u1[a1].size(); ++a2) {
      g.utilities[0].push_back(UtilityModel::deterministic(Rational::from_double(u1[a1][a2])));
      g.utilities[1].push_back(UtilityModel::deterministic(Rational::from_double(u2[a1][a2])));
    }
  g.validate();
  return g;
}

UtilityModel bernoulli(double p) {
  return UtilityModel::finite_support(
      {{Rational(0), Rational(1) - Rational::from_double(p)}, {Rational(1), Rational::from_double(p)}});
}

GameSpec bernoulli_game(const std::string& name, const std::vector<std::vector<double>>& p1,
                        const std::vector<std::vector<double>>& p2) {
  GameSpec g;
  g.name = name;
  g.agents = 2;
  g.actions = {static_cast<int>(p1.size()), static_cast<int>(p1[0].size())};
  g.utilities.resize(2);
  for (std::size_t a1 = 0; a1 < p1.size(); ++a1)
    for (std::size_t a2 = 0; a2 < p1[a1].size(); ++a2) {
      g.utilities[0].push_back(bernoulli(p1[a1][a2]));
      g.utilities[1].push_back(bernoulli(p2[a1][a2]));
    }
  g.validate();
  return g;
}

}  // namespace

GameSpec make_fixture(const std::string& name) {
  // baseline: unique equilibrium (1,1) that also maximizes welfare.
  if (name == "baseline")
    return matrix_game(name, {{0.4, 0.2}, {0.6, 0.8}}, {{0.4, 0.6}, {0.2, 0.8}});
  // cyclic: best responses cycle, no equilibrium; welfare/stability trade-off
  // has a unique maximizer at (1,1).
  if (name == "cyclic")
    return matrix_game(name, {{0.7, 0.2}, {0.3, 0.8}}, {{0.3, 0.8}, {0.6, 0.2}});
  // dilemma: unique equilibrium (1,1) but welfare is maximized at (0,0).
  if (name == "dilemma")
    return matrix_game(name, {{0.6, 0.1}, {0.9, 0.2}}, {{0.6, 0.9}, {0.1, 0.2}});
  // all_one: (0,0) gives both agents utility 1 (absorbing optimum).
  if (name == "all_one")
    return matrix_game(name, {{1.0, 0.4}, {0.6, 0.2}}, {{1.0, 0.6}, {0.4, 0.2}});
  // baseline with Bernoulli payoffs of the same means.
  if (name == "baseline_noisy")
    return bernoulli_game(name, {{0.4, 0.2}, {0.6, 0.8}}, {{0.4, 0.6}, {0.2, 0.8}});
  // trap: two equilibria; (0,0) is a high-exit-resistance class outside the
  // stochastically stable set {(1,1)}.
  if (name == "trap")
    return matrix_game(name, {{0.6, 0.2}, {0.2, 0.8}}, {{0.6, 0.2}, {0.2, 0.8}});
  throw ConfigError("unknown fixture: " + name);
}

std::vector<std::string> fixture_names() {
  return {"baseline", "cyclic", "dilemma", "all_one", "baseline_noisy", "trap"};
}

}  // namespace pdl
