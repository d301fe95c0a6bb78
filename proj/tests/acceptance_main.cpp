// End-to-end acceptance gate: one line per criterion, nonzero exit on failure.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pdl/analysis.hpp"
#include "pdl/chain.hpp"
#include "pdl/cooling.hpp"
#include "pdl/game.hpp"
#include "pdl/graph.hpp"
#include "pdl/large_deviations.hpp"
#include "pdl/sim.hpp"

using namespace pdl;

namespace {

const ResistanceFunctions kRf = ResistanceFunctions::defaults();

GlobalState aligned_state(const GameSpec& g, const ActionProfile& a) {
  GlobalState s;
  for (int i = 0; i < g.agents; ++i)
    s.agents.push_back(AgentState::content(a[static_cast<std::size_t>(i)], g.mean(i, a)));
  return s;
}

std::set<ActionProfile> profile_set(const std::vector<ActionProfile>& v) {
  return {v.begin(), v.end()};
}

std::set<int> node_set(const PMPChain& chain, const ResistanceGraph& graph,
                       const std::vector<int>& state_indices) {
  std::set<int> out;
  for (int s : state_indices) out.insert(graph.node_of_state[static_cast<std::size_t>(s)]);
  return out;
}

// 1. Runs on a game with an all-top-utility profile are trapped by it, and the
//    symbolic chain marks those states with identity rows.
bool absorption_criterion(std::string& note) {
  GameSpec g = make_fixture("all_one");
  GlobalState target = aligned_state(g, {0, 0});

  SimParams p;
  p.epsilon = 0.05;
  p.steps = 5000;
  p.seed = 20240815;
  p.replicates = 1000;
  RunReport report = run_itel(g, p, kRf);
  int absorbed = 0;
  for (const ReplicateResult& rep : report.replicates)
    if (rep.absorption && rep.absorption->second == target && rep.final_state == target)
      ++absorbed;

  PMPChain chain = build_chain(g, Algo::kItel, kRf);
  int idx = chain.state_index(target);
  bool identity = idx >= 0;
  if (identity) {
    const auto& row = chain.rows[static_cast<std::size_t>(idx)];
    identity = row.size() == 1 && row.front().first == idx && row.front().second.is_one();
  }

  std::ostringstream out;
  out << absorbed << "/1000 runs absorbed at the all-top state; identity row "
      << (identity ? "verified" : "missing");
  note = out.str();
  return absorbed == 1000 && identity;
}

// 2. With equilibria present, the closed-form argmax matches the tree-potential
//    argmin, and exact stationary mass concentrates on it as the noise fades.
bool equilibria_mass_criterion(std::string& note) {
  GameSpec g = make_fixture("baseline");
  PMPChain chain = build_chain(g, Algo::kItel, kRf);
  ResistanceGraph graph = build_resistance_graph(chain);
  SssPrediction pred = predict_sss_itel(chain, graph);
  PotentialTable pot = compute_potentials(graph);
  bool paths_agree = node_set(chain, graph, pred.state_indices) ==
                     std::set<int>(pot.minimizers.begin(), pot.minimizers.end());

  TheoremReport report = verify_theorem(g, Algo::kItel, kRf, {0.2, 0.1, 0.05, 0.02}, 0, 0, 1);
  double final_mass = report.rows.back().exact_mass.value_or(0.0);

  std::ostringstream out;
  out << "formula and tree potentials " << (paths_agree ? "agree" : "disagree")
      << "; stationary mass " << (report.mass_increasing ? "increasing" : "not increasing")
      << ", final " << final_mass;
  note = out.str();
  return paths_agree && report.passed && final_mass > 0.5;
}

// 3. Without equilibria the prediction reduces to the linear welfare/stability
//    tradeoff, and the reduction matches the tree potentials.
bool tradeoff_criterion(std::string& note) {
  GameSpec g = make_fixture("cyclic");
  PMPChain chain = build_chain(g, Algo::kItel, kRf);
  ResistanceGraph graph = build_resistance_graph(chain);
  SssPrediction pred = predict_sss_itel(chain, graph);
  if (pred.kind != PredictionCase::kTradeoff) {
    note = "expected the welfare/stability tradeoff case";
    return false;
  }

  const Rational psi_f = kRf.f_spec().linear->psi;
  const Rational psi_g = kRf.g_spec().linear->psi;
  std::vector<ActionProfile> best;
  Rational best_score;
  for (int pidx = 0; pidx < g.profile_count(); ++pidx) {
    ActionProfile a = g.profile_at(pidx);
    Rational welfare(0);
    bool has_gap = false;
    Rational min_gap(0);
    for (int i = 0; i < g.agents; ++i) {
      const Rational u = g.mean(i, a);
      welfare += u;
      for (int alt = 0; alt < g.actions[static_cast<std::size_t>(i)]; ++alt) {
        if (alt == a[static_cast<std::size_t>(i)]) continue;
        ActionProfile dev = a;
        dev[static_cast<std::size_t>(i)] = alt;
        const Rational gap = g.mean(i, dev) - u;
        if (gap > Rational(0) && (!has_gap || gap < min_gap)) {
          min_gap = gap;
          has_gap = true;
        }
      }
    }
    if (!has_gap) {
      note = "found an equilibrium profile in the no-equilibrium fixture";
      return false;
    }
    const Rational score = psi_f * welfare - psi_g * min_gap;
    if (best.empty() || score > best_score) {
      best = {a};
      best_score = score;
    } else if (score == best_score) {
      best.push_back(a);
    }
  }

  PotentialTable pot = compute_potentials(graph);
  bool graph_agrees = node_set(chain, graph, pred.state_indices) ==
                      std::set<int>(pot.minimizers.begin(), pot.minimizers.end());
  bool formula_agrees = profile_set(best) == profile_set(pred.profiles);
  note = std::string("linear reduction ") + (formula_agrees ? "matches" : "differs") +
         "; tree potentials " + (graph_agrees ? "agree" : "disagree");
  return formula_agrees && graph_agrees;
}

// 4. The memoryless variant maximizes virtual welfare over all aligned states
//    and can disagree with the benchmark-keeping variant.
bool memoryless_criterion(std::string& note) {
  GameSpec g = make_fixture("baseline");
  PMPChain chain = build_chain(g, Algo::kIodl, kRf);
  ResistanceGraph graph = build_resistance_graph(chain);
  SssPrediction iodl = predict_sss_iodl(chain, graph);
  PotentialTable pot = compute_potentials(graph);
  bool paths_agree = node_set(chain, graph, iodl.state_indices) ==
                     std::set<int>(pot.minimizers.begin(), pot.minimizers.end());

  Rational best_tw;
  std::vector<ActionProfile> best;
  for (const AlignedRow& row : iodl.table) {
    if (best.empty() || row.t_welfare > best_tw) {
      best = {row.profile};
      best_tw = row.t_welfare;
    } else if (row.t_welfare == best_tw) {
      best.push_back(row.profile);
    }
  }
  bool welfare_argmax = profile_set(best) == profile_set(iodl.profiles);

  GameSpec d = make_fixture("dilemma");
  SssPrediction itel_d = predict_sss(d, Algo::kItel, kRf);
  SssPrediction iodl_d = predict_sss(d, Algo::kIodl, kRf);
  bool diverge = profile_set(itel_d.profiles) != profile_set(iodl_d.profiles);

  note = std::string("welfare argmax ") + (welfare_argmax ? "matches" : "differs") +
         "; variants " + (diverge ? "part ways on the dilemma" : "coincide unexpectedly");
  return paths_agree && welfare_argmax && diverge;
}

// 5. Closed-form resistance identities hold exactly on the aggregated graph.
bool resistance_oracle_criterion(std::string& note) {
  GameSpec g = make_fixture("baseline");
  PMPChain chain = build_chain(g, Algo::kItel, kRf);
  ResistanceGraph graph = build_resistance_graph(chain);
  SssPrediction pred = predict_sss_itel(chain, graph);

  bool ok = pred.gamma_d.is_finite();
  Rational r_star_sum(0);
  for (const AlignedRow& row : pred.table) {
    Rational f_sum(0);
    for (const Rational& u : row.benchmarks) f_sum += kRf.f(u);
    ok = ok && row.r_from_d == Resistance::finite(f_sum);

    bool has_gap = false;
    Rational min_g;
    for (int i = 0; i < g.agents; ++i) {
      for (int alt = 0; alt < g.actions[static_cast<std::size_t>(i)]; ++alt) {
        if (alt == row.profile[static_cast<std::size_t>(i)]) continue;
        ActionProfile dev = row.profile;
        dev[static_cast<std::size_t>(i)] = alt;
        const Rational u = g.mean(i, dev);
        if (u <= row.benchmarks[static_cast<std::size_t>(i)]) continue;
        const Rational gv = kRf.g(row.benchmarks[static_cast<std::size_t>(i)], u);
        if (!has_gap || gv < min_g) min_g = gv;
        has_gap = true;
      }
    }
    if (has_gap) {
      const Rational ts = Rational(1) - min_g;
      ok = ok && !row.equilibrium && row.r_star == Resistance::finite(Rational(2) - ts);
    } else {
      ok = ok && row.equilibrium && row.r_star == Resistance::finite(Rational(2));
    }
    ok = ok && row.r_star.is_finite();
    r_star_sum += row.r_star.value;
    ok = ok && row.gamma == Resistance::finite(pred.gamma_d.value - row.r_star.value +
                                               row.r_from_d.value);
  }
  ok = ok && pred.gamma_d == Resistance::finite(r_star_sum);
  note = ok ? "entry, escape, and potential identities exact on all aligned rows"
            : "an exact resistance identity failed";
  return ok;
}

// 6. The contraction arborescence solver agrees with exhaustive search.
bool arborescence_criterion(std::string& note) {
  std::mt19937_64 rng(715517);
  std::uniform_int_distribution<int> size_dist(2, 6);
  std::uniform_int_distribution<int> num_dist(0, 9);
  std::uniform_int_distribution<int> den_dist(1, 4);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  int checked = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = size_dist(rng);
    std::vector<std::vector<Resistance>> w(
        static_cast<std::size_t>(n),
        std::vector<Resistance>(static_cast<std::size_t>(n), Resistance::infinite()));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && unif(rng) > 0.25)
          w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
              Resistance::finite(Rational(num_dist(rng), den_dist(rng)));
    for (int root = 0; root < n; ++root) {
      const Arborescence a = min_arborescence_exhaustive(w, root);
      const Arborescence b = min_arborescence_by_contraction(w, root);
      if (!(a.total == b.total)) {
        note = "solver mismatch on a random graph";
        return false;
      }
      ++checked;
    }
  }
  std::ostringstream out;
  out << checked << " rooted instances agree exactly";
  note = out.str();
  return true;
}

// 7. The numeric rate function reproduces closed forms and dominates the
//    quadratic lower bounds.
bool rate_function_criterion(std::string& note) {
  double worst = 0;
  for (double p : {0.3, 0.5, 0.7}) {
    UtilityModel u = UtilityModel::finite_support(
        {{Rational(0), Rational::from_double(1.0 - p)}, {Rational(1), Rational::from_double(p)}});
    for (int k = 1; k <= 19; ++k) {
      const double x = 0.05 * k;
      const double kl = x * std::log(x / p) + (1.0 - x) * std::log((1.0 - x) / (1.0 - p));
      const double rate = legendre(u, x);
      worst = std::max(worst, std::abs(rate - kl));
      if (std::abs(rate - kl) > 1e-9) {
        note = "bernoulli rate mismatch";
        return false;
      }
      if (rate < hoeffding_lower(x, p) - 1e-12) {
        note = "quadratic lower bound violated";
        return false;
      }
    }
  }
  for (double x : {-1.0, 0.0, 0.3, 1.7}) {
    const double expect = (x - 0.4) * (x - 0.4) / (2.0 * 0.09);
    if (std::abs(legendre_gaussian(0.4, 0.09, x) - expect) > 1e-9) {
      note = "gaussian rate mismatch";
      return false;
    }
  }
  std::ostringstream out;
  out << "closed forms matched, worst error " << worst;
  note = out.str();
  return true;
}

// 8. Exact tail probabilities of the period mean approach the predicted decay
//    exponent, measured by the slope of log-probability against log-epsilon.
bool decay_slope_criterion(std::string& note) {
  UtilityModel u = UtilityModel::finite_support(
      {{Rational(0), Rational(1, 2)}, {Rational(1), Rational(1, 2)}});
  RateCheck rc = empirical_rate_check(u, QuantizationParams::from_q(4), 3, 8.0,
                                      {1e-1, 1e-2, 1e-3});
  const double expected = 8.0 * legendre(u, 0.75);
  if (rc.zero_probability || rc.points.size() != 3 ||
      std::abs(rc.limit - expected) > 1e-12) {
    note = "rate-check setup is inconsistent";
    return false;
  }
  double prev = -1;
  bool monotone = true;
  for (const RatePoint& pt : rc.points) {
    const double err = std::abs(pt.slope - rc.limit);
    if (prev >= 0 && err >= prev) monotone = false;
    prev = err;
  }
  const double rel = std::abs(rc.points.back().slope - rc.limit) / rc.limit;
  std::ostringstream out;
  out << "final slope " << rc.points.back().slope << " vs " << rc.limit << " ("
      << rel * 100.0 << "% off), convergence " << (monotone ? "monotone" : "not monotone");
  note = out.str();
  return monotone && rel <= 0.2;
}

// 9. Long quantized runs at fixed noise spend most of their time on the
//    predicted profile superset.
bool quantized_occupancy_criterion(std::string& note) {
  GameSpec g = make_fixture("baseline_noisy");
  QuantizationParams quant = QuantizationParams::from_q(20);
  RitelClassification cls = classify_ritel_states(g, kRf, quant, 200.0);
  RitelPrediction pred = predict_sss_ritel(cls);
  std::set<ActionProfile> target(pred.profile_superset.begin(), pred.profile_superset.end());

  SimParams p;
  p.epsilon = 0.05;
  p.steps = 10000;  // periods
  p.seed = 424242;
  p.replicates = 20;
  p.tau0 = 200.0;
  p.quant = quant;
  p.burn_in = 0.5;
  RunReport report = run_ritel(g, p, kRf);
  double inside = 0;
  for (const auto& [state, fraction] : report.mean_occupancy(true))
    if (state.all_content() && target.count(state.benchmark_profile()) > 0) inside += fraction;

  std::ostringstream out;
  out << "burned occupancy of the predicted profiles: " << inside;
  note = out.str();
  return inside > 0.8;
}

// 10. Slowly cooled runs keep gaining mass on the prediction; fast freezing
//     strands replicates; the divergence verdicts match the series analysis.
bool cooling_criterion(std::string& note) {
  GameSpec g = make_fixture("baseline");
  SssPrediction pred = predict_sss(g, Algo::kItel, kRf);
  std::set<ActionProfile> target = profile_set(pred.profiles);

  Schedule poly = Schedule::polynomial(2.0, 4.0);
  ScheduleComparison slow =
      schedule_experiment(g, Algo::kItel, {poly}, kRf, 20000, 200, 1234, target);
  const ScheduleOutcome& out_slow = slow.outcomes.front();
  bool no_drop = true;
  for (std::size_t c = 1; c < out_slow.target_fraction.size(); ++c)
    if (out_slow.ci[c].second < out_slow.ci[c - 1].first) no_drop = false;
  bool grows = out_slow.final_fraction > out_slow.target_fraction.front();

  GameSpec trap = make_fixture("trap");
  SssPrediction trap_pred = predict_sss(trap, Algo::kItel, kRf);
  ScheduleComparison fast =
      schedule_experiment(trap, Algo::kItel, {Schedule::exponential(0.5, 0.99)}, kRf, 20000,
                          200, 77, profile_set(trap_pred.profiles));
  double stranded = 1.0 - fast.outcomes.front().final_fraction;

  using V = DivergenceReport::Verdict;
  bool verdicts = divergence_test(poly, 4.0, 10000).verdict == V::kDiverges &&
                  divergence_test(Schedule::exponential(0.5, 0.99), 4.0, 10000).verdict ==
                      V::kConverges &&
                  divergence_test(Schedule::constant(0.1), 4.0, 10000).verdict == V::kDiverges;

  std::ostringstream out;
  out << "slow cooling fraction " << out_slow.target_fraction.front() << " -> "
      << out_slow.final_fraction << (no_drop ? " without a significant drop" : " with a drop")
      << "; fast freezing strands " << stranded * 100.0 << "% on the trap";
  note = out.str();
  return no_drop && grows && stranded >= 0.05 && verdicts;
}

// 11. Structural invariants: stochastic rows, entrywise limit, recurrence
//     classes, and the quantized set inclusions on every fixture.
bool invariants_criterion(std::string& note) {
  GameSpec g = make_fixture("baseline");
  PMPChain chain = build_chain(g, Algo::kItel, kRf);

  for (const auto& row : chain.rows) {
    EpsPoly sum;
    for (const auto& [to, poly] : row) sum = sum + poly;
    if (!sum.is_one()) {
      note = "a symbolic row does not sum to one";
      return false;
    }
  }
  for (double eps : {0.3, 0.05}) {
    for (const auto& row : evaluate_chain(chain, eps)) {
      double sum = 0;
      for (const auto& [to, v] : row) sum += v;
      if (std::abs(sum - 1.0) > 1e-9) {
        note = "a numeric row does not sum to one";
        return false;
      }
    }
  }

  // The smallest positive exponent in the baseline chain is 1/20, so the
  // entrywise gap decays like eps^(1/20); the grid must span that scale.
  const auto limit = unperturbed_limit(chain);
  double prev_gap = 2.0;
  for (double eps : {1e-20, 1e-40, 1e-80}) {
    const auto rows = evaluate_chain(chain, eps);
    double gap = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::map<int, double> lim(limit[i].begin(), limit[i].end());
      for (const auto& [to, v] : rows[i]) gap = std::max(gap, std::abs(v - lim[to]));
    }
    if (gap >= prev_gap) {
      note = "entrywise convergence to the unperturbed chain failed";
      return false;
    }
    prev_gap = gap;
  }
  if (prev_gap > 1e-3) {
    note = "entrywise limit gap too large at eps = 1e-8";
    return false;
  }

  ClassPartition part = recurrence_classes(limit);
  int singinal = 0;
  bool d_recurrent = false;
  int recurrent_classes = 0;
  for (int c = 0; c < part.class_count(); ++c) {
    if (!part.recurrent[static_cast<std::size_t>(c)]) continue;
    ++recurrent_classes;
    const auto& members = part.members[static_cast<std::size_t>(c)];
    if (members.size() != 1) {
      note = "a recurrent class of the unperturbed chain is not a singleton";
      return false;
    }
    const GlobalState& s = chain.states[static_cast<std::size_t>(members.front())];
    if (s.is_all_discontent()) d_recurrent = true;
    else if (s.all_content()) ++singinal;
  }
  if (recurrent_classes != 5 || singinal != 4 || !d_recurrent) {
    note = "unexpected recurrent classes in the unperturbed chain";
    return false;
  }

  QuantizationParams quant = QuantizationParams::from_q(20);
  auto subset = [](const std::vector<int>& a, const std::vector<int>& b) {
    for (int x : a)
      if (std::find(b.begin(), b.end(), x) == b.end()) return false;
    return true;
  };
  for (const std::string& name : fixture_names()) {
    RitelClassification cls = classify_ritel_states(make_fixture(name), kRf, quant, 200.0);
    bool ok = subset(cls.a_absorbing, cls.a_delta) && subset(cls.a_delta, cls.e_delta) &&
              subset(cls.e_states, cls.e_delta) && subset(cls.e_states, cls.c_strong);
    for (int idx : cls.c_strong)
      ok = ok && cls.states[static_cast<std::size_t>(idx)].strongly_aligned;
    if (!ok) {
      note = "a quantized set inclusion failed on fixture " + name;
      return false;
    }
  }

  note = "rows stochastic, limit reached entrywise, 5 recurrent classes, inclusions hold";
  return true;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    bool (*run)(std::string&);
  };
  const std::vector<Criterion> criteria{
      {"absorption traps every run", absorption_criterion},
      {"equilibrium prediction gains stationary mass", equilibria_mass_criterion},
      {"welfare/stability tradeoff reduction", tradeoff_criterion},
      {"memoryless welfare maximization", memoryless_criterion},
      {"exact resistance identities", resistance_oracle_criterion},
      {"arborescence solver cross-check", arborescence_criterion},
      {"rate function closed forms", rate_function_criterion},
      {"tail decay slope convergence", decay_slope_criterion},
      {"quantized superset occupancy", quantized_occupancy_criterion},
      {"cooling schedules", cooling_criterion},
      {"structural invariants", invariants_criterion},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::string detail;
    bool ok = false;
    try {
      ok = criteria[i].run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (!ok) ++failures;
    std::printf("criterion %2zu [%s]: %s (%s)\n", i + 1, criteria[i].name,
                ok ? "PASS" : "FAIL", detail.c_str());
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
