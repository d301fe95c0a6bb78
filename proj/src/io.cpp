#include "pdl/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pdl/errors.hpp"

namespace pdl {

namespace {

void expect_keys(const Json& j, const std::string& path,
                 std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "config must be an object" : path + ": must be an object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || item.key() == k;
    if (!ok) throw ConfigError(path + "/" + item.key() + ": unknown key");
  }
}

double get_number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  return j.get<double>();
}

int64_t get_integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return j.get<int64_t>();
}

std::string get_string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path + ": expected a string");
  return j.get<std::string>();
}

}  // namespace

Rational rational_from_json(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return Rational(j.get<int64_t>());
  if (j.is_number()) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path + ": expected a finite number");
    return Rational::from_double(v);
  }
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    const auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return Rational(std::stoll(s));
      return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    } catch (const std::exception&) {
      throw ConfigError(path + ": cannot parse rational '" + s + "'");
    }
  }
  throw ConfigError(path + ": expected a number or 'n/d' string");
}

Json rational_to_json(const Rational& r) {
  if (r.is_integer()) return Json(r.num());
  return Json(r.str());
}

UtilityModel utility_from_json(const Json& j, const std::string& path) {
  if (j.is_number() || j.is_string())
    return UtilityModel::deterministic(rational_from_json(j, path));
  if (j.is_object()) {
    expect_keys(j, path, {"support"});
    if (!j.contains("support") || !j["support"].is_array())
      throw ConfigError(path + "/support: expected an array of [value, weight] pairs");
    std::vector<std::pair<Rational, Rational>> atoms;
    int k = 0;
    for (const Json& pair : j["support"]) {
      const std::string p = path + "/support/" + std::to_string(k++);
      if (!pair.is_array() || pair.size() != 2)
        throw ConfigError(p + ": expected [value, weight]");
      atoms.emplace_back(rational_from_json(pair[0], p + "/0"),
                         rational_from_json(pair[1], p + "/1"));
    }
    return UtilityModel::finite_support(std::move(atoms));
  }
  throw ConfigError(path + ": expected a value or {\"support\": ...}");
}

GameSpec game_from_json(const Json& j) {
  expect_keys(j, "/game", {"name", "agents", "actions", "utilities"});
  GameSpec g;
  if (j.contains("name")) g.name = get_string(j["name"], "/game/name");
  if (!j.contains("agents")) throw ConfigError("/game/agents: missing");
  g.agents = static_cast<int>(get_integer(j["agents"], "/game/agents"));
  if (!j.contains("actions") || !j["actions"].is_array())
    throw ConfigError("/game/actions: expected an array");
  for (const Json& a : j["actions"])
    g.actions.push_back(static_cast<int>(get_integer(a, "/game/actions")));
  if (!j.contains("utilities") || !j["utilities"].is_array())
    throw ConfigError("/game/utilities: expected an array per agent");
  int i = 0;
  for (const Json& row : j["utilities"]) {
    const std::string path = "/game/utilities/" + std::to_string(i++);
    if (!row.is_array()) throw ConfigError(path + ": expected an array over profiles");
    std::vector<UtilityModel> cells;
    int p = 0;
    for (const Json& cell : row)
      cells.push_back(utility_from_json(cell, path + "/" + std::to_string(p++)));
    g.utilities.push_back(std::move(cells));
  }
  g.validate();
  return g;
}

Json game_to_json(const GameSpec& g) {
  Json j;
  j["name"] = g.name;
  j["agents"] = g.agents;
  j["actions"] = g.actions;
  Json utilities = Json::array();
  for (int i = 0; i < g.agents; ++i) {
    Json row = Json::array();
    for (int p = 0; p < g.profile_count(); ++p) {
      const UtilityModel& u = g.utilities[i][p];
      if (u.is_deterministic()) {
        row.push_back(rational_to_json(u.atoms.front().first));
      } else {
        Json support = Json::array();
        for (const auto& [value, weight] : u.atoms)
          support.push_back(Json::array({rational_to_json(value), rational_to_json(weight)}));
        row.push_back(Json{{"support", support}});
      }
    }
    utilities.push_back(std::move(row));
  }
  j["utilities"] = std::move(utilities);
  return j;
}

GameSpec load_game_file(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("game file is not valid JSON: ") + e.what());
  }
  return game_from_json(j);
}

UtilityModel load_distribution_file(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("distribution file is not valid JSON: ") + e.what());
  }
  return utility_from_json(j, "/distribution");
}

Json schedule_to_json(const Schedule& s) {
  Json j;
  switch (s.kind) {
    case Schedule::Kind::kConstant:
      j["kind"] = "constant";
      j["epsilon"] = s.constant_eps;
      break;
    case Schedule::Kind::kPolynomial:
      j["kind"] = "polynomial";
      j["k0"] = s.k0;
      j["gamma"] = s.gamma;
      break;
    case Schedule::Kind::kExponential:
      j["kind"] = "exponential";
      j["eps0"] = s.eps0;
      j["rate"] = s.rate;
      break;
    case Schedule::Kind::kTable:
      j["kind"] = "table";
      j["values"] = s.table;
      break;
  }
  return j;
}

Schedule schedule_from_json(const Json& j, const std::string& path) {
  expect_keys(j, path, {"kind", "epsilon", "k0", "gamma", "eps0", "rate", "values"});
  if (!j.contains("kind")) throw ConfigError(path + "/kind: missing");
  const std::string kind = get_string(j["kind"], path + "/kind");
  if (kind == "constant")
    return Schedule::constant(get_number(j.value("epsilon", Json(0.1)), path + "/epsilon"));
  if (kind == "polynomial")
    return Schedule::polynomial(get_number(j.value("k0", Json(2.0)), path + "/k0"),
                                get_number(j.value("gamma", Json(1.0)), path + "/gamma"));
  if (kind == "exponential")
    return Schedule::exponential(get_number(j.value("eps0", Json(0.5)), path + "/eps0"),
                                 get_number(j.value("rate", Json(0.99)), path + "/rate"));
  if (kind == "table") {
    if (!j.contains("values") || !j["values"].is_array())
      throw ConfigError(path + "/values: expected an array");
    std::vector<double> values;
    for (const Json& v : j["values"]) values.push_back(get_number(v, path + "/values"));
    return Schedule::from_table(std::move(values));
  }
  throw ConfigError(path + "/kind: unknown schedule kind '" + kind + "'");
}

namespace {

ResistanceFunctions policy_from_json(const Json& j) {
  expect_keys(j, "/policy", {"phi_f", "psi_f", "phi_g", "psi_g", "c_f", "f0", "g0"});
  const ResistanceFunctions defs = ResistanceFunctions::defaults();
  auto field = [&](const char* key, const Rational& fallback) {
    if (!j.contains(key)) return fallback;
    return rational_from_json(j[key], std::string("/policy/") + key);
  };
  FSpec f;
  f.linear = LinearMap{field("phi_f", defs.f_spec().linear->phi),
                       field("psi_f", defs.f_spec().linear->psi)};
  GSpec g;
  g.linear = LinearMap{field("phi_g", defs.g_spec().linear->phi),
                       field("psi_g", defs.g_spec().linear->psi)};
  const Rational c_f = field("c_f", defs.c_f());
  const Rational f0 = field("f0", defs.f0());
  const Rational g0 = field("g0", defs.g0());
  try {
    return ResistanceFunctions(std::move(f), std::move(g), c_f, f0, g0);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("/policy: ") + e.what());
  }
}

Json policy_to_json(const ResistanceFunctions& rf) {
  Json j;
  j["phi_f"] = rational_to_json(rf.f_spec().linear->phi);
  j["psi_f"] = rational_to_json(rf.f_spec().linear->psi);
  j["phi_g"] = rational_to_json(rf.g_spec().linear->phi);
  j["psi_g"] = rational_to_json(rf.g_spec().linear->psi);
  j["c_f"] = rational_to_json(rf.c_f());
  j["f0"] = rational_to_json(rf.f0());
  j["g0"] = rational_to_json(rf.g0());
  return j;
}

}  // namespace

RunConfig parse_config(const Json& j) {
  expect_keys(j, "", {"command", "game", "algorithm", "policy", "sim", "analysis", "cool",
                      "output", "seed", "strict"});
  RunConfig c;
  if (!j.contains("command")) throw ConfigError("/command: missing");
  c.command = get_string(j["command"], "/command");
  if (c.command != "simulate" && c.command != "analyze" && c.command != "cool")
    throw ConfigError("/command: expected simulate, analyze, or cool");

  if (!j.contains("game")) throw ConfigError("/game: missing");
  expect_keys(j["game"], "/game", {"fixture", "path"});
  if (j["game"].contains("fixture") == j["game"].contains("path"))
    throw ConfigError("/game: exactly one of fixture or path is required");
  if (j["game"].contains("fixture"))
    c.fixture = get_string(j["game"]["fixture"], "/game/fixture");
  else
    c.game_path = get_string(j["game"]["path"], "/game/path");

  if (j.contains("algorithm")) {
    const std::string name = get_string(j["algorithm"], "/algorithm");
    try {
      c.algo = algo_from_name(name);
    } catch (const std::exception&) {
      throw ConfigError("/algorithm: unknown algorithm '" + name + "'");
    }
  }
  if (j.contains("strict")) {
    if (!j["strict"].is_boolean()) throw ConfigError("/strict: expected a boolean");
    c.strict = j["strict"].get<bool>();
  }
  if (j.contains("policy")) c.rf = policy_from_json(j["policy"]);
  if (c.strict && c.rf.f0() + c.rf.g0() > Rational(1))
    throw ConfigError("/policy: Condition 1 requires F0 + G0 <= 1");

  if (j.contains("sim")) {
    const Json& s = j["sim"];
    expect_keys(s, "/sim", {"epsilon", "steps", "replicates", "burn_in", "trace_stride",
                            "tau0", "delta", "q"});
    if (s.contains("epsilon")) c.sim.epsilon = get_number(s["epsilon"], "/sim/epsilon");
    if (s.contains("steps")) c.sim.steps = get_integer(s["steps"], "/sim/steps");
    if (s.contains("replicates"))
      c.sim.replicates = static_cast<int>(get_integer(s["replicates"], "/sim/replicates"));
    if (s.contains("burn_in")) c.sim.burn_in = get_number(s["burn_in"], "/sim/burn_in");
    if (s.contains("trace_stride"))
      c.sim.trace_stride = static_cast<int>(get_integer(s["trace_stride"], "/sim/trace_stride"));
    if (s.contains("tau0")) c.sim.tau0 = get_number(s["tau0"], "/sim/tau0");
    if (s.contains("delta") && s.contains("q"))
      throw ConfigError("/sim: give delta or q, not both");
    if (s.contains("delta"))
      c.sim.quant = QuantizationParams::from_delta(get_number(s["delta"], "/sim/delta"));
    if (s.contains("q"))
      c.sim.quant = QuantizationParams::from_q(get_integer(s["q"], "/sim/q"));
  }
  c.sim.strict = c.strict;

  if (c.algo == Algo::kRitel && c.strict && c.sim.quant.q > 0 && c.sim.tau0 > 0) {
    const double q = static_cast<double>(c.sim.quant.q);
    if (2.0 * c.sim.tau0 / (q * q) < 1.0 - 1e-12)
      throw ConfigError("/sim: Condition 2 requires 2*tau0*delta^2 >= 1");
  }

  if (j.contains("analysis")) {
    expect_keys(j["analysis"], "/analysis", {"eps_grid"});
    if (j["analysis"].contains("eps_grid")) {
      if (!j["analysis"]["eps_grid"].is_array())
        throw ConfigError("/analysis/eps_grid: expected an array");
      for (const Json& e : j["analysis"]["eps_grid"])
        c.eps_grid.push_back(get_number(e, "/analysis/eps_grid"));
    }
  }

  if (j.contains("cool")) {
    const Json& k = j["cool"];
    expect_keys(k, "/cool", {"schedules", "horizon", "replicates", "checkpoints", "gamma"});
    CoolSection cs;
    if (!k.contains("schedules") || !k["schedules"].is_array() || k["schedules"].empty())
      throw ConfigError("/cool/schedules: expected a nonempty array");
    int idx = 0;
    for (const Json& s : k["schedules"])
      cs.schedules.push_back(schedule_from_json(s, "/cool/schedules/" + std::to_string(idx++)));
    if (!k.contains("horizon")) throw ConfigError("/cool/horizon: missing");
    cs.horizon = get_integer(k["horizon"], "/cool/horizon");
    if (!k.contains("replicates")) throw ConfigError("/cool/replicates: missing");
    cs.replicates = static_cast<int>(get_integer(k["replicates"], "/cool/replicates"));
    if (k.contains("checkpoints"))
      cs.checkpoints = static_cast<int>(get_integer(k["checkpoints"], "/cool/checkpoints"));
    if (k.contains("gamma")) cs.gamma = get_number(k["gamma"], "/cool/gamma");
    c.cool = std::move(cs);
  }

  if (j.contains("output")) {
    expect_keys(j["output"], "/output", {"path", "format"});
    if (j["output"].contains("path"))
      c.output_path = get_string(j["output"]["path"], "/output/path");
    if (j["output"].contains("format")) {
      c.format = get_string(j["output"]["format"], "/output/format");
      if (c.format != "json" && c.format != "csv")
        throw ConfigError("/output/format: expected json or csv");
    }
  }

  const bool needs_seed = c.command == "simulate" || c.command == "cool";
  if (j.contains("seed"))
    c.sim.seed = static_cast<uint64_t>(get_integer(j["seed"], "/seed"));
  else if (needs_seed)
    throw ConfigError("/seed: mandatory for simulate and cool");

  if (c.command == "cool" && !c.cool) throw ConfigError("/cool: missing for the cool command");
  return c;
}

RunConfig parse_config_file(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

Json emit_config(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  if (!c.fixture.empty())
    j["game"] = Json{{"fixture", c.fixture}};
  else
    j["game"] = Json{{"path", c.game_path}};
  j["algorithm"] = algo_name(c.algo);
  j["strict"] = c.strict;
  j["policy"] = policy_to_json(c.rf);
  Json sim;
  sim["epsilon"] = c.sim.epsilon;
  sim["steps"] = c.sim.steps;
  sim["replicates"] = c.sim.replicates;
  sim["burn_in"] = c.sim.burn_in;
  sim["trace_stride"] = c.sim.trace_stride;
  if (c.sim.tau0 > 0) sim["tau0"] = c.sim.tau0;
  if (c.sim.quant.q > 0) sim["q"] = c.sim.quant.q;
  j["sim"] = std::move(sim);
  if (!c.eps_grid.empty()) j["analysis"] = Json{{"eps_grid", c.eps_grid}};
  if (c.cool) {
    Json k;
    Json schedules = Json::array();
    for (const Schedule& s : c.cool->schedules) schedules.push_back(schedule_to_json(s));
    k["schedules"] = std::move(schedules);
    k["horizon"] = c.cool->horizon;
    k["replicates"] = c.cool->replicates;
    k["checkpoints"] = c.cool->checkpoints;
    k["gamma"] = c.cool->gamma;
    j["cool"] = std::move(k);
  }
  if (!c.output_path.empty() || c.format != "json") {
    Json out;
    if (!c.output_path.empty()) out["path"] = c.output_path;
    out["format"] = c.format;
    j["output"] = std::move(out);
  }
  j["seed"] = c.sim.seed;
  return j;
}

GameSpec resolve_game(const RunConfig& c) {
  if (!c.fixture.empty()) return make_fixture(c.fixture);
  return load_game_file(c.game_path);
}

namespace {

Json occupancy_to_json(const std::map<GlobalState, double>& occ, Algo algo) {
  Json j;
  for (const auto& [s, p] : occ) j[state_label(s, algo)] = p;
  return j;
}

}  // namespace

Json report_to_json(const RunReport& r) {
  Json j;
  j["algorithm"] = algo_name(r.algo);
  Json params;
  params["epsilon"] = r.params.epsilon;
  params["steps"] = r.params.steps;
  params["seed"] = r.params.seed;
  params["replicates"] = r.params.replicates;
  params["burn_in"] = r.params.burn_in;
  if (r.params.tau0 > 0) params["tau0"] = r.params.tau0;
  if (r.params.quant.q > 0) params["q"] = r.params.quant.q;
  j["params"] = std::move(params);
  j["mean_occupancy"] = occupancy_to_json(r.mean_occupancy(false), r.algo);
  j["mean_occupancy_burned"] = occupancy_to_json(r.mean_occupancy(true), r.algo);
  Json reps = Json::array();
  for (const ReplicateResult& rep : r.replicates) {
    Json one;
    one["index"] = rep.index;
    if (rep.absorption) {
      one["absorption"] = Json{{"step", rep.absorption->first},
                               {"state", state_label(rep.absorption->second, r.algo)}};
    } else {
      one["absorption"] = nullptr;
    }
    one["final"] = state_label(rep.final_state, r.algo);
    if (!rep.trace.empty()) {
      Json trace = Json::array();
      for (const GlobalState& s : rep.trace) trace.push_back(state_label(s, r.algo));
      one["trace"] = std::move(trace);
    }
    reps.push_back(std::move(one));
  }
  j["replicates"] = std::move(reps);
  return j;
}

std::string occupancy_csv(const RunReport& r) {
  std::ostringstream out;
  out << "state,fraction\n";
  char buf[64];
  for (const auto& [s, p] : r.mean_occupancy(false)) {
    std::snprintf(buf, sizeof(buf), "%.17g", p);
    out << state_label(s, r.algo) << "," << buf << "\n";
  }
  return out.str();
}

Json prediction_to_json(const SssPrediction& p, const PMPChain& chain) {
  Json j;
  j["algorithm"] = algo_name(p.algo);
  j["case"] = prediction_case_name(p.kind);
  Json profiles = Json::array();
  for (const ActionProfile& a : p.profiles) profiles.push_back(a);
  j["profiles"] = std::move(profiles);
  Json states = Json::array();
  for (int s : p.state_indices) states.push_back(state_label(chain.states[s], p.algo));
  j["states"] = std::move(states);
  j["gamma_d"] = p.gamma_d.str();
  j["margin"] = p.margin.str();
  j["interdependent"] = p.interdependent;
  Json table = Json::array();
  for (const AlignedRow& row : p.table) {
    Json one;
    one["state"] = state_label(chain.states[row.state_index], p.algo);
    one["profile"] = row.profile;
    Json benchmarks = Json::array();
    for (const Rational& b : row.benchmarks) benchmarks.push_back(b.str());
    one["benchmarks"] = std::move(benchmarks);
    one["t_welfare"] = row.t_welfare.str();
    one["t_stability"] = row.t_stability ? Json(row.t_stability->str()) : Json(nullptr);
    one["equilibrium"] = row.equilibrium;
    one["optimal"] = row.optimal;
    one["r_star"] = row.r_star.str();
    one["r_from_d"] = row.r_from_d.str();
    one["gamma"] = row.gamma.str();
    table.push_back(std::move(one));
  }
  j["table"] = std::move(table);
  return j;
}

Json ritel_classification_to_json(const RitelClassification& c) {
  Json j;
  j["q"] = c.quant.q;
  j["tau0"] = c.tau0;
  j["r0"] = c.r0();
  Json states = Json::array();
  for (const RitelStateInfo& s : c.states) {
    Json one;
    one["state"] = state_label(s.state, Algo::kRitel);
    one["profile"] = s.profile;
    one["bins"] = s.bins;
    one["strongly_aligned"] = s.strongly_aligned;
    one["equilibrium"] = s.equilibrium;
    one["delta_equilibrium"] = s.delta_equilibrium;
    one["optimal"] = s.optimal;
    one["t_welfare"] = s.t_welfare.str();
    one["ts_plus"] = s.ts_plus ? Json(s.ts_plus->str()) : Json(nullptr);
    one["ts_minus"] = s.ts_minus ? Json(s.ts_minus->str()) : Json(nullptr);
    one["noise_resistance"] =
        std::isfinite(s.noise_resistance) ? Json(s.noise_resistance) : Json("inf");
    states.push_back(std::move(one));
  }
  j["states"] = std::move(states);
  j["counts"] = Json{{"weakly_aligned", c.states.size()},
                     {"strongly_aligned", c.c_strong.size()},
                     {"equilibria", c.e_states.size()},
                     {"delta_equilibria", c.e_delta.size()},
                     {"optimal", c.a_delta.size()},
                     {"absorbing", c.a_absorbing.size()}};
  return j;
}

Json ritel_prediction_to_json(const RitelPrediction& p, const RitelClassification& c) {
  Json j;
  j["absorbing_case"] = p.absorbing_case;
  j["equilibria_case"] = p.equilibria_case;
  Json superset = Json::array();
  for (int idx : p.state_superset)
    superset.push_back(state_label(c.states[idx].state, Algo::kRitel));
  j["state_superset"] = std::move(superset);
  Json profiles = Json::array();
  for (const ActionProfile& a : p.profile_superset) profiles.push_back(a);
  j["profile_superset"] = std::move(profiles);
  Json table = Json::array();
  for (const RitelProfileRow& row : p.profile_table) {
    Json one;
    one["profile"] = row.profile;
    Json means = Json::array();
    for (const Rational& m : row.means) means.push_back(m.str());
    one["means"] = std::move(means);
    one["equilibrium"] = row.equilibrium;
    one["delta_equilibrium"] = row.delta_equilibrium;
    one["three_delta_equilibrium"] = row.three_delta_equilibrium;
    one["delta_optimal"] = row.delta_optimal;
    one["tw"] = row.tw.str();
    one["tw_plus"] = row.tw_plus.str();
    one["tw_minus"] = row.tw_minus.str();
    one["ts"] = row.ts ? Json(row.ts->str()) : Json(nullptr);
    one["ts_plus"] = row.ts_plus ? Json(row.ts_plus->str()) : Json(nullptr);
    one["ts_minus"] = row.ts_minus ? Json(row.ts_minus->str()) : Json(nullptr);
    one["predicted"] = row.predicted;
    table.push_back(std::move(one));
  }
  j["profile_table"] = std::move(table);
  if (!p.note.empty()) j["note"] = p.note;
  return j;
}

Json theorem_to_json(const TheoremReport& t) {
  Json j;
  j["algorithm"] = algo_name(t.algo);
  j["absorbing_case"] = t.absorbing_case;
  Json profiles = Json::array();
  for (const ActionProfile& a : t.predicted_profiles) profiles.push_back(a);
  j["predicted_profiles"] = std::move(profiles);
  Json rows = Json::array();
  for (const TheoremEpsRow& row : t.rows) {
    Json one;
    one["eps"] = row.eps;
    one["exact_mass"] = row.exact_mass ? Json(*row.exact_mass) : Json(nullptr);
    one["best_other_mass"] = row.best_other_mass ? Json(*row.best_other_mass) : Json(nullptr);
    one["sim_occupancy"] = row.sim_occupancy ? Json(*row.sim_occupancy) : Json(nullptr);
    one["pass"] = row.pass;
    rows.push_back(std::move(one));
  }
  j["rows"] = std::move(rows);
  j["mass_increasing"] = t.mass_increasing;
  j["passed"] = t.passed;
  if (!t.note.empty()) j["note"] = t.note;
  return j;
}

Json cooled_to_json(const CooledReport& r) {
  Json j;
  j["algorithm"] = algo_name(r.algo);
  j["schedule"] = schedule_to_json(r.schedule);
  j["horizon"] = r.horizon;
  j["seed"] = r.seed;
  j["checkpoints"] = r.checkpoints;
  Json states = Json::array();
  for (const auto& at : r.state_at) {
    Json col = Json::array();
    for (const GlobalState& s : at) col.push_back(state_label(s, r.algo));
    states.push_back(std::move(col));
  }
  j["state_at"] = std::move(states);
  return j;
}

Json comparison_to_json(const ScheduleComparison& c) {
  Json j;
  j["algorithm"] = algo_name(c.algo);
  j["horizon"] = c.horizon;
  j["replicates"] = c.replicates;
  j["seed"] = c.seed;
  Json outcomes = Json::array();
  for (const ScheduleOutcome& o : c.outcomes) {
    Json one;
    one["schedule"] = schedule_to_json(o.schedule);
    one["checkpoints"] = o.checkpoints;
    one["target_fraction"] = o.target_fraction;
    Json ci = Json::array();
    for (const auto& [lo, hi] : o.ci) ci.push_back(Json::array({lo, hi}));
    one["ci"] = std::move(ci);
    one["final_fraction"] = o.final_fraction;
    outcomes.push_back(std::move(one));
  }
  j["outcomes"] = std::move(outcomes);
  j["ranking"] = c.ranking;
  return j;
}

Json divergence_to_json(const DivergenceReport& d) {
  Json j;
  j["schedule"] = schedule_to_json(d.schedule);
  j["gamma"] = d.gamma;
  j["horizon"] = d.horizon;
  j["partial_sum"] = d.partial_sum;
  j["verdict"] = verdict_name(d.verdict);
  return j;
}

Json rate_check_to_json(const RateCheck& rc) {
  Json j;
  j["limit"] = rc.limit;
  j["zero_probability"] = rc.zero_probability;
  Json points = Json::array();
  for (const RatePoint& p : rc.points) {
    Json one;
    one["eps"] = p.eps;
    one["tau"] = p.tau;
    one["log_prob"] = std::isfinite(p.log_prob) ? Json(p.log_prob) : Json(nullptr);
    one["point_ratio"] = std::isfinite(p.point_ratio) ? Json(p.point_ratio) : Json(nullptr);
    one["slope"] = std::isfinite(p.slope) ? Json(p.slope) : Json(nullptr);
    points.push_back(std::move(one));
  }
  j["points"] = std::move(points);
  return j;
}

std::string rate_check_csv(const RateCheck& rc) {
  std::ostringstream out;
  out << "eps,tau,log_prob,ratio,slope\n";
  char buf[256];
  for (const RatePoint& p : rc.points) {
    std::snprintf(buf, sizeof(buf), "%.12g,%lld,%.12g,%.12g,%.12g\n", p.eps,
                  static_cast<long long>(p.tau), p.log_prob, p.point_ratio, p.slope);
    out << buf;
  }
  return out.str();
}

std::string rate_grid_csv(const UtilityModel& u, const std::vector<double>& xs) {
  std::ostringstream out;
  out << "x,rate,hoeffding,bernstein\n";
  const double mu = u.mean().to_double();
  const double var = u.variance().to_double();
  char buf[256];
  for (double x : xs) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g\n", x, legendre(u, x),
                  hoeffding_lower(x, mu), bernstein_lower(x, mu, var));
    out << buf;
  }
  return out.str();
}

std::string dot_graph(const PMPChain& chain, const ResistanceGraph& graph) {
  std::ostringstream out;
  out << "digraph resistance {\n  rankdir=LR;\n";
  for (int node = 0; node < graph.node_count(); ++node) {
    const int rep = graph.nodes[node].front();
    std::string label = state_label(chain.states[rep], chain.algo);
    if (graph.nodes[node].size() > 1)
      label += " (+" + std::to_string(graph.nodes[node].size() - 1) + ")";
    out << "  n" << node << " [label=\"" << label << "\"];\n";
  }
  for (int i = 0; i < graph.node_count(); ++i)
    for (int j2 = 0; j2 < graph.node_count(); ++j2) {
      if (i == j2 || !graph.edge[i][j2].is_finite()) continue;
      out << "  n" << i << " -> n" << j2 << " [label=\"" << graph.edge[i][j2].str() << "\"];\n";
    }
  out << "}\n";
  return out.str();
}

std::string canonical_dump(const Json& j) { return j.dump(2) + "\n"; }

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << bytes;
  if (!out) throw ConfigError("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace pdl
