#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdl/analysis.hpp"
#include "pdl/cooling.hpp"
#include "pdl/game.hpp"
#include "pdl/large_deviations.hpp"
#include "pdl/sim.hpp"

namespace pdl {

// Ordered JSON keeps key insertion order, so emission order is fixed by the
// emitters and serialization is byte-stable.
using Json = nlohmann::ordered_json;

struct CoolSection {
  std::vector<Schedule> schedules;
  int64_t horizon = 0;
  int replicates = 0;
  int checkpoints = 8;
  double gamma = 1;  // exponent for the divergence test
};

struct RunConfig {
  std::string command;  // simulate | analyze | cool
  std::string fixture;
  std::string game_path;  // exactly one of fixture/game_path set
  Algo algo = Algo::kItel;
  ResistanceFunctions rf = ResistanceFunctions::defaults();
  SimParams sim;
  std::vector<double> eps_grid;  // analyze only
  std::optional<CoolSection> cool;
  std::string output_path;  // empty selects stdout
  std::string format = "json";
  bool strict = true;
};

RunConfig parse_config(const Json& j);
RunConfig parse_config_file(const std::string& path);
Json emit_config(const RunConfig& c);
GameSpec resolve_game(const RunConfig& c);

Rational rational_from_json(const Json& j, const std::string& path);
Json rational_to_json(const Rational& r);

UtilityModel utility_from_json(const Json& j, const std::string& path);
GameSpec game_from_json(const Json& j);
Json game_to_json(const GameSpec& g);
GameSpec load_game_file(const std::string& path);
UtilityModel load_distribution_file(const std::string& path);

Json schedule_to_json(const Schedule& s);
Schedule schedule_from_json(const Json& j, const std::string& path);

Json report_to_json(const RunReport& r);
std::string occupancy_csv(const RunReport& r);
Json prediction_to_json(const SssPrediction& p, const PMPChain& chain);
Json ritel_classification_to_json(const RitelClassification& c);
Json ritel_prediction_to_json(const RitelPrediction& p, const RitelClassification& c);
Json theorem_to_json(const TheoremReport& t);
Json cooled_to_json(const CooledReport& r);
Json comparison_to_json(const ScheduleComparison& c);
Json divergence_to_json(const DivergenceReport& d);
Json rate_check_to_json(const RateCheck& rc);
std::string rate_check_csv(const RateCheck& rc);
std::string rate_grid_csv(const UtilityModel& u, const std::vector<double>& xs);
std::string dot_graph(const PMPChain& chain, const ResistanceGraph& graph);

std::string canonical_dump(const Json& j);
void write_file(const std::string& path, const std::string& bytes);
std::string read_file(const std::string& path);

}  // namespace pdl
