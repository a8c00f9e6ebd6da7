#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "famp/demos/script.hpp"
#include "famp/force/replanning.hpp"
#include "famp/harness/model.hpp"
#include "famp/mp/basis.hpp"
#include "famp/sim/env_config.hpp"

namespace famp::harness {

enum class ExperimentKind { kReplay, kVerticalAdaptation, kHorizontalAdaptation, kPowerPlug };

std::string to_string(ExperimentKind k);
ExperimentKind parse_experiment(const std::string& name);

struct TrainingGroup {
  std::string label;
  sim::EnvConfig env;
  std::size_t n_demos = 7;
};

/// Everything needed to reproduce one experiment row.
struct ExperimentSetup {
  ExperimentKind kind = ExperimentKind::kReplay;
  std::vector<TrainingGroup> training;
  sim::EnvConfig test_env;
  demos::DemoScript script;
  demos::DemoJitter jitter;
  mp::DmpConfig dmp;
  force::ReplanConfig replan;
};

ExperimentSetup preset(ExperimentKind kind);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::kReplay;
  std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
  /// Merge patches applied to every environment, to the test environment
  /// only, to the replanning, the primitive and the demo script settings.
  nlohmann::json env_overrides = nlohmann::json::object();
  nlohmann::json test_env_overrides = nlohmann::json::object();
  nlohmann::json replan_overrides = nlohmann::json::object();
  nlohmann::json dmp_overrides = nlohmann::json::object();
  nlohmann::json script_overrides = nlohmann::json::object();
  std::size_t n_runs = 7;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "results";

  void validate() const;
  /// Preset with the overrides applied.
  ExperimentSetup setup() const;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);
nlohmann::json to_json(const force::ReplanConfig& cfg);
force::ReplanConfig replan_config_from_json(const nlohmann::json& j,
                                            force::ReplanConfig base = {});
nlohmann::json to_json(const mp::DmpConfig& cfg);
mp::DmpConfig dmp_config_from_json(const nlohmann::json& j, mp::DmpConfig base = {});

/// Run i uses base_seed * 1000 + i.
std::uint64_t run_seed(std::uint64_t base_seed, std::size_t run);

/// Training demonstrations of all groups, in group order.
demos::DemoDataset training_dataset(const ExperimentSetup& setup, std::uint64_t seed);

struct RunRow {
  Method method = Method::kCic;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  bool inserted = false;
  std::size_t clicks = 0;
  double position_error_mm = 0.0;
  double max_force = 0.0;
  std::size_t replans = 0;
  /// -1 when the method does not draw a demonstration.
  long demo_index = -1;
  bool demo_matches = false;
  bool complete = true;
  std::string fault;
};

struct MethodSummary {
  Method method = Method::kCic;
  std::size_t runs = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  double mean_position_error_mm = 0.0;
  double mean_replans = 0.0;
  std::size_t total_replans = 0;
};

struct ResultsTable {
  ExperimentKind experiment = ExperimentKind::kReplay;
  double seat_depth_mm = 0.0;
  std::vector<RunRow> rows;
  std::vector<MethodSummary> summaries;

  std::vector<RunRow> rows_for(Method m) const;
  const MethodSummary& summary(Method m) const;
};

/// Aggregates rows into one summary per method, in `methods` order.
std::vector<MethodSummary> summarize(const std::vector<RunRow>& rows,
                                     const std::vector<Method>& methods);

ResultsTable run_experiment(const ExperimentConfig& cfg);
/// Same, also saving each run's execution log as <method>_run<i>.json.
ResultsTable run_experiment(const ExperimentConfig& cfg, const std::filesystem::path* log_dir);

nlohmann::json to_json(const ResultsTable& table);
std::string runs_csv(const ResultsTable& table);
std::string summary_csv(const ResultsTable& table);
/// Writes results.json, runs.csv and summary.csv into `dir`.
void write_results(const ResultsTable& table, const std::filesystem::path& dir);

}  // namespace famp::harness
