#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "pdl/chain.hpp"
#include "pdl/game.hpp"
#include "pdl/graph.hpp"
#include "pdl/large_deviations.hpp"

using namespace pdl;

namespace {

GameSpec one_agent_game() {
  GameSpec g;
  g.name = "solo";
  g.agents = 1;
  g.actions = {2};
  g.utilities = {{UtilityModel::deterministic(Rational(2, 5)),
                  UtilityModel::deterministic(Rational(4, 5))}};
  g.validate();
  return g;
}

// Noisy two-agent game with a reachable all-top-bin profile at q = 4:
// (1,1) only ever lands in bins {3, 4}, so both agents can pin benchmark 4.
GameSpec noisy_absorbing_game() {
  GameSpec g;
  g.name = "noisy_absorbing";
  g.agents = 2;
  g.actions = {2, 2};
  UtilityModel diag = UtilityModel::finite_support(
      {{Rational(1, 2), Rational(1, 4)}, {Rational(1), Rational(3, 4)}});
  UtilityModel peak = UtilityModel::finite_support(
      {{Rational(3, 4), Rational(1, 2)}, {Rational(1), Rational(1, 2)}});
  UtilityModel zero = UtilityModel::deterministic(Rational(0));
  g.utilities = {{diag, zero, zero, peak}, {diag, zero, zero, peak}};
  g.validate();
  return g;
}

GlobalState aligned_state(const GameSpec& g, const ActionProfile& a) {
  GlobalState s;
  for (int i = 0; i < g.agents; ++i)
    s.agents.push_back(AgentState::content(a[static_cast<std::size_t>(i)], g.mean(i, a)));
  return s;
}

EpsPoly row_sum(const std::vector<std::pair<int, EpsPoly>>& row) {
  EpsPoly s;
  for (const auto& [_, p] : row) s += p;
  return s;
}

}  // namespace

TEST_CASE("one-agent chain matches the hand enumeration") {
  GameSpec g = one_agent_game();
  PMPChain chain = build_chain(g, Algo::kItel, ResistanceFunctions::defaults());

  // D, content on the low action, content on the high action; utilities are
  // deterministic so hopeful/watchful are unreachable.
  REQUIRE(chain.states.size() == 3);
  int d = chain.d_index;
  int lo = chain.state_index(GlobalState{{AgentState::content(0, Rational(2, 5))}});
  int hi = chain.state_index(GlobalState{{AgentState::content(1, Rational(4, 5))}});
  REQUIRE(d >= 0);
  REQUIRE(lo >= 0);
  REQUIRE(hi >= 0);
  CHECK(chain.states[static_cast<std::size_t>(d)].is_all_discontent());

  // discontent row: uniform exploration, acceptance resisted by F
  std::map<int, EpsPoly> drow(chain.rows[static_cast<std::size_t>(d)].begin(),
                              chain.rows[static_cast<std::size_t>(d)].end());
  CHECK(drow.at(lo) == EpsPoly::power(Rational(17, 100)).scaled(Rational(1, 2)));
  CHECK(drow.at(hi) == EpsPoly::power(Rational(9, 100)).scaled(Rational(1, 2)));
  CHECK(drow.at(d) == EpsPoly::one() - drow.at(lo) - drow.at(hi));

  // low benchmark: exploring up costs eps * eps^G(2/5, 4/5) = eps^(1 + 17/50)
  std::map<int, EpsPoly> lrow(chain.rows[static_cast<std::size_t>(lo)].begin(),
                              chain.rows[static_cast<std::size_t>(lo)].end());
  CHECK(lrow.at(hi) == EpsPoly::power(Rational(67, 50)));
  CHECK(lrow.at(lo) == EpsPoly::one_minus_power(Rational(67, 50)));

  // high benchmark: every exploration reverts, so the state is absorbing
  REQUIRE(chain.rows[static_cast<std::size_t>(hi)].size() == 1);
  CHECK(chain.rows[static_cast<std::size_t>(hi)][0].first == hi);
  CHECK(chain.rows[static_cast<std::size_t>(hi)][0].second.is_one());

  CHECK(chain.state_index(GlobalState{{AgentState::content(0, Rational(1, 2))}}) == -1);
}

TEST_CASE("symbolic rows are exactly stochastic with positive leading terms") {
  GameSpec g = make_fixture("baseline");
  for (Algo algo : {Algo::kItel, Algo::kIodl}) {
    PMPChain chain = build_chain(g, algo, ResistanceFunctions::defaults());
    REQUIRE(!chain.states.empty());
    for (const auto& row : chain.rows) {
      CHECK(row_sum(row).is_one());
      int prev = -1;
      for (const auto& [target, poly] : row) {
        CHECK(target > prev);  // sorted, no duplicate targets
        prev = target;
        CHECK(poly.leading_coefficient_positive());
      }
    }
  }
}

TEST_CASE("escape from discontent carries the summed acceptance resistance") {
  GameSpec g = make_fixture("baseline");
  PMPChain chain = build_chain(g, Algo::kItel, ResistanceFunctions::defaults());
  int d = chain.d_index;
  std::map<int, EpsPoly> drow(chain.rows[static_cast<std::size_t>(d)].begin(),
                              chain.rows[static_cast<std::size_t>(d)].end());

  // r(D -> aligned at a) = sum_i F(u_i(a)); joint uniform exploration is 1/4
  auto direct = [&](const ActionProfile& a) {
    int idx = chain.state_index(aligned_state(g, a));
    REQUIRE(idx >= 0);
    return drow.at(idx);
  };
  CHECK(direct({0, 0}) == EpsPoly::power(Rational(17, 50)).scaled(Rational(1, 4)));
  CHECK(direct({1, 1}) == EpsPoly::power(Rational(9, 50)).scaled(Rational(1, 4)));
  CHECK(direct({0, 1}) == EpsPoly::power(Rational(17, 50)).scaled(Rational(1, 4)));
  CHECK(direct({1, 0}) == EpsPoly::power(Rational(17, 50)).scaled(Rational(1, 4)));
}

TEST_CASE("an all-top-utility profile is absorbing in the symbolic chain") {
  GameSpec g = make_fixture("all_one");
  PMPChain chain = build_chain(g, Algo::kItel, ResistanceFunctions::defaults());
  int idx = chain.state_index(aligned_state(g, {0, 0}));
  REQUIRE(idx >= 0);
  REQUIRE(chain.rows[static_cast<std::size_t>(idx)].size() == 1);
  CHECK(chain.rows[static_cast<std::size_t>(idx)][0].first == idx);
  CHECK(chain.rows[static_cast<std::size_t>(idx)][0].second.is_one());

  // the other diagonal profile keeps exploring, so it is not absorbing
  int other = chain.state_index(aligned_state(g, {1, 1}));
  REQUIRE(other >= 0);
  CHECK(chain.rows[static_cast<std::size_t>(other)].size() > 1);
}

TEST_CASE("memoryless variant reaches no hopeful or watchful state") {
  GameSpec g = make_fixture("baseline");
  PMPChain itel = build_chain(g, Algo::kItel, ResistanceFunctions::defaults());
  PMPChain iodl = build_chain(g, Algo::kIodl, ResistanceFunctions::defaults());

  bool itel_has_transitional = false;
  for (const GlobalState& s : itel.states)
    for (const AgentState& a : s.agents)
      if (a.mood == Mood::kHopeful || a.mood == Mood::kWatchful) itel_has_transitional = true;
  CHECK(itel_has_transitional);

  for (const GlobalState& s : iodl.states)
    for (const AgentState& a : s.agents)
      CHECK((a.mood == Mood::kContent || a.mood == Mood::kDiscontent));
  CHECK(iodl.states.size() < itel.states.size());
}

TEST_CASE("state enumeration respects the cap") {
  GameSpec g = make_fixture("baseline");
  CHECK_THROWS_AS(build_chain(g, Algo::kItel, ResistanceFunctions::defaults(), 3), SizeError);
  try {
    enumerate_states(g, Algo::kItel, ResistanceFunctions::defaults(), 5);
    FAIL("cap not enforced");
  } catch (const SizeError& e) {
    CHECK(e.cap == 5);
  }
}

TEST_CASE("evaluated rows converge entrywise to the unperturbed limit") {
  GameSpec g = make_fixture("baseline");
  PMPChain chain = build_chain(g, Algo::kItel, ResistanceFunctions::defaults());
  auto lim = unperturbed_limit(chain);
  REQUIRE(lim.size() == chain.rows.size());

  // the limit is exactly the exponent-zero coefficient of each entry
  for (std::size_t i = 0; i < chain.rows.size(); ++i) {
    std::map<int, double> expected;
    for (const auto& [target, poly] : chain.rows[i]) {
      if (!poly.terms().empty() && poly.terms().front().first.is_zero())
        expected[target] = poly.terms().front().second.to_double();
    }
    std::map<int, double> got(lim[i].begin(), lim[i].end());
    REQUIRE(got.size() == expected.size());
    for (const auto& [target, value] : expected)
      CHECK(got.at(target) == doctest::Approx(value).epsilon(1e-12));
    double sum = 0;
    for (const auto& [_, value] : got) sum += value;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }

  // max entrywise distance shrinks monotonically along a decreasing eps grid
  auto max_diff = [&](double eps) {
    double worst = 0;
    for (std::size_t i = 0; i < chain.rows.size(); ++i) {
      std::map<int, double> limit_row(lim[i].begin(), lim[i].end());
      for (const auto& [target, poly] : chain.rows[i]) {
        auto it = limit_row.find(target);
        double l = it == limit_row.end() ? 0.0 : it->second;
        worst = std::max(worst, std::abs(poly.eval(eps) - l));
      }
    }
    return worst;
  };
  double prev = max_diff(1e-2);
  for (double eps : {1e-4, 1e-8, 1e-12}) {
    double cur = max_diff(eps);
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK(prev < 0.2);
}

TEST_CASE("limit recurrence splits into aligned singletons plus discontent") {
  GameSpec g = make_fixture("baseline");
  PMPChain chain = build_chain(g, Algo::kItel, ResistanceFunctions::defaults());
  ClassPartition part = recurrence_classes(unperturbed_limit(chain));

  int recurrent_count = 0;
  for (int c = 0; c < part.class_count(); ++c)
    if (part.recurrent[static_cast<std::size_t>(c)]) ++recurrent_count;
  CHECK(recurrent_count == 5);

  for (ActionProfile a : {ActionProfile{0, 0}, {0, 1}, {1, 0}, {1, 1}}) {
    int idx = chain.state_index(aligned_state(g, a));
    REQUIRE(idx >= 0);
    int c = part.component[static_cast<std::size_t>(idx)];
    CHECK(part.recurrent[static_cast<std::size_t>(c)]);
    CHECK(part.members[static_cast<std::size_t>(c)].size() == 1);
  }
  int dc = part.component[static_cast<std::size_t>(chain.d_index)];
  CHECK(part.recurrent[static_cast<std::size_t>(dc)]);
  CHECK(part.members[static_cast<std::size_t>(dc)].size() == 1);

  // every state holding a transitional mood is transient
  for (std::size_t i = 0; i < chain.states.size(); ++i) {
    bool transitional = false;
    for (const AgentState& a : chain.states[i].agents)
      if (a.mood == Mood::kHopeful || a.mood == Mood::kWatchful) transitional = true;
    if (transitional) CHECK_FALSE(part.recurrent[static_cast<std::size_t>(part.component[i])]);
  }
}

TEST_CASE("quantized numeric chain is stochastic with exact tails") {
  GameSpec g = noisy_absorbing_game();
  QuantizationParams quant = QuantizationParams::from_q(4);
  NumericChain chain =
      build_ritel_numeric_chain(g, ResistanceFunctions::defaults(), quant, 8.0, 0.1);

  CHECK(chain.tau == rounds_per_period(8.0, 0.1));
  CHECK(chain.tails_exact);
  CHECK(chain.max_mc_half_width == 0.0);
  CHECK(chain.states[static_cast<std::size_t>(chain.d_index)].is_all_discontent());

  for (const auto& row : chain.rows) {
    double sum = 0;
    for (const auto& [target, p] : row) {
      CHECK(p > 0.0);
      CHECK(target >= 0);
      CHECK(static_cast<std::size_t>(target) < chain.states.size());
      sum += p;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }

  // the all-top-bin state on (1,1) is reachable: both agents can observe only
  // bins {3, 4} there, and the period mean hits the top bin with positive mass
  GlobalState top{{AgentState::content(1, Rational(4)), AgentState::content(1, Rational(4))}};
  int top_idx = chain.state_index(top);
  REQUIRE(top_idx >= 0);

  // no exploration at the top bin and every observed bin sits inside the
  // hysteresis band, so the state is absorbing
  REQUIRE(chain.rows[static_cast<std::size_t>(top_idx)].size() == 1);
  CHECK(chain.rows[static_cast<std::size_t>(top_idx)][0].first == top_idx);
  CHECK(chain.rows[static_cast<std::size_t>(top_idx)][0].second == doctest::Approx(1.0));

  CHECK_THROWS_AS(
      build_ritel_numeric_chain(g, ResistanceFunctions::defaults(), quant, 8.0, 0.1, 2),
      SizeError);
}
