#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pdl/analysis.hpp"
#include "pdl/cooling.hpp"
#include "pdl/errors.hpp"
#include "pdl/io.hpp"

namespace {

using namespace pdl;

void emit(const std::string& path, const std::string& bytes) {
  if (path.empty())
    std::cout << bytes;
  else
    write_file(path, bytes);
}

RunReport dispatch_run(const GameSpec& game, Algo algo, const SimParams& params,
                       const ResistanceFunctions& rf) {
  switch (algo) {
    case Algo::kItel: return run_itel(game, params, rf);
    case Algo::kIodl: return run_iodl(game, params, rf);
    case Algo::kRitel: return run_ritel(game, params, rf);
  }
  throw ConfigError("unknown algorithm");
}

int run_simulate(const RunConfig& cfg) {
  const GameSpec game = resolve_game(cfg);
  const RunReport report = dispatch_run(game, cfg.algo, cfg.sim, cfg.rf);
  if (cfg.format == "csv")
    emit(cfg.output_path, occupancy_csv(report));
  else
    emit(cfg.output_path, canonical_dump(report_to_json(report)));
  return 0;
}

int run_analyze(const RunConfig& cfg, const std::string& dot_path, int cap) {
  const GameSpec game = resolve_game(cfg);
  Json out;
  if (cfg.algo == Algo::kRitel) {
    if (cfg.sim.quant.q <= 0 || cfg.sim.tau0 <= 0)
      throw ConfigError("quantized analysis needs delta (or q) and tau0");
    const RitelClassification cls =
        classify_ritel_states(game, cfg.rf, cfg.sim.quant, cfg.sim.tau0);
    const RitelPrediction pred = predict_sss_ritel(cls);
    out["classification"] = ritel_classification_to_json(cls);
    out["prediction"] = ritel_prediction_to_json(pred, cls);
    if (!cfg.eps_grid.empty()) {
      const TheoremReport verdict =
          verify_theorem_ritel(game, cfg.rf, cfg.sim.quant, cfg.sim.tau0, cfg.eps_grid,
                               cfg.sim.steps, cfg.sim.replicates, cfg.sim.seed);
      out["theorem"] = theorem_to_json(verdict);
    }
    if (!dot_path.empty())
      throw ConfigError("--dot applies to the trial-and-error variants only");
  } else {
    const PMPChain chain = build_chain(game, cfg.algo, cfg.rf, cap);
    const ResistanceGraph graph = build_resistance_graph(chain);
    const SssPrediction pred =
        cfg.algo == Algo::kItel ? predict_sss_itel(chain, graph) : predict_sss_iodl(chain, graph);
    out["prediction"] = prediction_to_json(pred, chain);
    if (!cfg.eps_grid.empty()) {
      const TheoremReport verdict = verify_theorem(game, cfg.algo, cfg.rf, cfg.eps_grid,
                                                   cfg.sim.steps, cfg.sim.replicates,
                                                   cfg.sim.seed, cap);
      out["theorem"] = theorem_to_json(verdict);
    }
    if (!dot_path.empty()) write_file(dot_path, dot_graph(chain, graph));
  }
  emit(cfg.output_path, canonical_dump(out));
  return 0;
}

int run_cool_config(const RunConfig& cfg) {
  if (!cfg.cool) throw ConfigError("cool command needs a cool section");
  const GameSpec game = resolve_game(cfg);
  const SssPrediction pred = predict_sss(game, cfg.algo, cfg.rf);
  std::set<ActionProfile> target(pred.profiles.begin(), pred.profiles.end());

  Json out;
  Json divergence = Json::array();
  for (const Schedule& s : cfg.cool->schedules)
    divergence.push_back(
        divergence_to_json(divergence_test(s, cfg.cool->gamma, cfg.cool->horizon)));
  out["divergence"] = std::move(divergence);
  const ScheduleComparison cmp =
      schedule_experiment(game, cfg.algo, cfg.cool->schedules, cfg.rf, cfg.cool->horizon,
                          cfg.cool->replicates, cfg.sim.seed, target, cfg.cool->checkpoints);
  out["target_profiles"] = Json(std::vector<ActionProfile>(target.begin(), target.end()));
  out["experiment"] = comparison_to_json(cmp);
  emit(cfg.output_path, canonical_dump(out));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and exact analyzer for perturbation-based distributed learning"};
  app.require_subcommand(1);

  std::string config_path;
  std::string fixture, game_path, algo_name_flag = "itel", out_path, format = "json";
  std::string dot_path, dist_path;
  SimParams sim;
  double delta = 0;
  int64_t q = 0;
  std::vector<double> eps_grid;
  int cap = kDefaultStateCap;

  CLI::App* simulate = app.add_subcommand("simulate", "run the learning process");
  simulate->add_option("--config", config_path, "JSON config file");
  simulate->add_option("--fixture", fixture, "built-in game name");
  simulate->add_option("--game", game_path, "game JSON file");
  simulate->add_option("--algo", algo_name_flag, "itel | iodl | ritel");
  simulate->add_option("--eps", sim.epsilon, "perturbation size");
  simulate->add_option("--steps", sim.steps, "steps (or periods)");
  simulate->add_option("--replicates", sim.replicates, "independent replicates");
  bool seed_set = false;
  uint64_t seed = 0;
  simulate->add_option("--seed", seed, "base RNG seed")->each([&](const std::string&) {
    seed_set = true;
  });
  simulate->add_option("--tau0", sim.tau0, "period-length constant");
  simulate->add_option("--delta", delta, "bin width 1/q");
  simulate->add_option("--q", q, "bins per unit");
  simulate->add_option("--burn-in", sim.burn_in, "fraction of steps dropped");
  simulate->add_option("--trace-stride", sim.trace_stride, "trace every k steps");
  simulate->add_option("--out", out_path, "output file (default stdout)");
  simulate->add_option("--format", format, "json | csv");

  CLI::App* analyze = app.add_subcommand("analyze", "exact chain analysis and predictions");
  analyze->add_option("--config", config_path, "JSON config file");
  analyze->add_option("--fixture", fixture, "built-in game name");
  analyze->add_option("--game", game_path, "game JSON file");
  analyze->add_option("--algo", algo_name_flag, "itel | iodl | ritel");
  analyze->add_option("--eps-grid", eps_grid, "decreasing epsilons for exact verification");
  analyze->add_option("--sim-steps", sim.steps, "simulation cross-check steps");
  analyze->add_option("--sim-replicates", sim.replicates, "simulation cross-check replicates");
  analyze->add_option("--seed", seed, "simulation cross-check seed");
  analyze->add_option("--tau0", sim.tau0, "period-length constant (quantized)");
  analyze->add_option("--delta", delta, "bin width (quantized)");
  analyze->add_option("--q", q, "bins per unit (quantized)");
  analyze->add_option("--cap", cap, "state-count cap");
  analyze->add_option("--dot", dot_path, "write the resistance graph as dot");
  analyze->add_option("--out", out_path, "output file");

  CLI::App* ld = app.add_subcommand("ld", "rate functions and tail slopes");
  ld->add_option("--dist", dist_path, "distribution JSON file")->required();
  int64_t bin = -1;
  double tau0 = 0;
  std::vector<double> grid;
  std::vector<double> xs;
  ld->add_option("--bin", bin, "bin index for the slope check");
  ld->add_option("--delta", delta, "bin width 1/q");
  ld->add_option("--q", q, "bins per unit");
  ld->add_option("--tau0", tau0, "period-length constant");
  ld->add_option("--grid", grid, "epsilon grid for the slope check");
  ld->add_option("--xs", xs, "rate-function evaluation points");
  ld->add_option("--out", out_path, "output file");

  CLI::App* cool = app.add_subcommand("cool", "inhomogeneous schedules");
  cool->add_option("--config", config_path, "JSON config file")->required();

  CLI::App* fixtures = app.add_subcommand("fixtures", "dump built-in games");
  std::string name, out_dir;
  fixtures->add_option("--name", name, "print one fixture");
  fixtures->add_option("--out-dir", out_dir, "write each fixture as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      RunConfig cfg;
      if (!config_path.empty()) {
        cfg = parse_config_file(config_path);
        if (cfg.command != "simulate") throw ConfigError("config command is not simulate");
      } else {
        if (!seed_set) throw ConfigError("--seed is mandatory for simulate");
        cfg.command = "simulate";
        cfg.fixture = fixture;
        cfg.game_path = game_path;
        cfg.algo = algo_from_name(algo_name_flag);
        cfg.sim = sim;
        cfg.sim.seed = seed;
        if (delta > 0) cfg.sim.quant = QuantizationParams::from_delta(delta);
        if (q > 0) cfg.sim.quant = QuantizationParams::from_q(q);
        cfg.output_path = out_path;
        cfg.format = format;
      }
      return run_simulate(cfg);
    }
    if (analyze->parsed()) {
      RunConfig cfg;
      if (!config_path.empty()) {
        cfg = parse_config_file(config_path);
        if (cfg.command != "analyze") throw ConfigError("config command is not analyze");
      } else {
        cfg.command = "analyze";
        cfg.fixture = fixture;
        cfg.game_path = game_path;
        cfg.algo = algo_from_name(algo_name_flag);
        cfg.sim = sim;
        cfg.sim.seed = seed;
        if (delta > 0) cfg.sim.quant = QuantizationParams::from_delta(delta);
        if (q > 0) cfg.sim.quant = QuantizationParams::from_q(q);
        cfg.eps_grid = eps_grid;
        cfg.output_path = out_path;
      }
      return run_analyze(cfg, dot_path, cap);
    }
    if (ld->parsed()) {
      const UtilityModel dist = load_distribution_file(dist_path);
      if (!grid.empty()) {
        if (delta <= 0 && q <= 0) throw ConfigError("--grid needs --delta or --q");
        if (bin < 0) throw ConfigError("--grid needs --bin");
        if (tau0 <= 0) throw ConfigError("--grid needs --tau0");
        const QuantizationParams quant =
            q > 0 ? QuantizationParams::from_q(q) : QuantizationParams::from_delta(delta);
        const RateCheck rc =
            empirical_rate_check(dist, quant, static_cast<int>(bin), tau0, grid);
        emit(out_path, rate_check_csv(rc));
      } else {
        std::vector<double> points = xs;
        if (points.empty())
          for (int i = 1; i <= 19; ++i) points.push_back(0.05 * i);
        emit(out_path, rate_grid_csv(dist, points));
      }
      return 0;
    }
    if (cool->parsed()) {
      RunConfig cfg = parse_config_file(config_path);
      if (cfg.command != "cool") throw ConfigError("config command is not cool");
      return run_cool_config(cfg);
    }
    if (fixtures->parsed()) {
      if (!name.empty()) {
        std::cout << canonical_dump(game_to_json(make_fixture(name)));
        return 0;
      }
      for (const std::string& fx : fixture_names()) {
        if (!out_dir.empty()) {
          write_file(out_dir + "/" + fx + ".json", canonical_dump(game_to_json(make_fixture(fx))));
        } else {
          std::cout << fx << "\n";
        }
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kExitConfigError);
  } catch (const AssumptionError& e) {
    std::cerr << "assumption violated: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kExitAssumptionError);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kExitConsistencyError);
  }
  return 0;
}
