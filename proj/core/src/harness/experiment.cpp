#include "famp/harness/experiment.hpp"

#include <cstdio>
#include <fstream>

#include "famp/error.hpp"
#include "famp/harness/methods.hpp"
#include "famp/harness/plots.hpp"

namespace famp::harness {

namespace {

using nlohmann::json;

sim::EnvConfig patched(const sim::EnvConfig& env, const json& patch) {
  if (patch.empty()) return env;
  json j = sim::to_json(env);
  j.merge_patch(patch);
  return sim::env_config_from_json(j);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid value for '") + key + "': " + e.what());
  }
}

sim::EnvConfig base_env() {
  sim::EnvConfig env;
  env.n_pos_dims = 2;
  env.orientation = sim::Orientation::kVertical;
  env.k_plug = 400.0;
  env.kp = 30.0;
  env.kd = 1.0;
  return env;
}

force::ReplanConfig base_replan() {
  force::ReplanConfig c;
  c.delta = 0.5;
  c.cooldown = 0.2;
  c.obs_noise = 0.01;
  c.clip_sigma = 2.0;
  return c;
}

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kReplay: return "replay";
    case ExperimentKind::kVerticalAdaptation: return "vertical_adaptation";
    case ExperimentKind::kHorizontalAdaptation: return "horizontal_adaptation";
    case ExperimentKind::kPowerPlug: return "power_plug";
  }
  return "unknown";
}

ExperimentKind parse_experiment(const std::string& name) {
  for (auto k : {ExperimentKind::kReplay, ExperimentKind::kVerticalAdaptation,
                 ExperimentKind::kHorizontalAdaptation, ExperimentKind::kPowerPlug}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown experiment '" + name +
                    "' (expected replay|vertical_adaptation|horizontal_adaptation|power_plug)");
}

ExperimentSetup preset(ExperimentKind kind) {
  ExperimentSetup s;
  s.kind = kind;
  s.dmp.n_basis = 25;
  s.replan = base_replan();
  switch (kind) {
    case ExperimentKind::kReplay: {
      const sim::EnvConfig soft = base_env();
      s.training = {{"soft", soft, 7}};
      s.test_env = soft;
      break;
    }
    case ExperimentKind::kVerticalAdaptation: {
      sim::EnvConfig soft = base_env();
      sim::EnvConfig firm = base_env();
      firm.k_plug = 900.0;
      s.training = {{"soft", soft, 7}, {"firm", firm, 7}};
      s.test_env = firm;
      break;
    }
    case ExperimentKind::kHorizontalAdaptation: {
      // Sockets 40 mm apart along the insertion axis, same world start pose.
      sim::EnvConfig near = base_env();
      near.orientation = sim::Orientation::kHorizontal;
      near.kp = 320.0;
      near.kd = 0.0;
      sim::EnvConfig far = near;
      near.socket_origin = -0.02 * near.axis();
      near.start_depth = -0.01;
      far.socket_origin = 0.02 * far.axis();
      far.start_depth = -0.05;
      s.training = {{"near", near, 7}, {"far", far, 7}};
      s.script.approach_speed = 0.03;
      s.script.duration = 6.0;
      s.test_env = far;
      // Contact timing is the cue here; each replan refines the last posterior.
      s.replan.clip_sigma = 1.0;
      s.replan.accumulate = true;
      break;
    }
    case ExperimentKind::kPowerPlug: {
      sim::EnvConfig low;
      low.n_pos_dims = 1;
      low.detents = {{0.01, 1.0}};
      low.k_plug = 400.0;
      low.kp = 1000.0;
      sim::EnvConfig high = low;
      high.k_plug = 900.0;
      s.training = {{"low", low, 7}, {"high", high, 1}};
      s.test_env = high;
      s.replan.clip_sigma = 3.0;
      break;
    }
  }
  return s;
}

void ExperimentConfig::validate() const {
  if (n_runs < 1) throw ConfigError("n_runs must be at least 1");
  if (methods.empty()) throw ConfigError("at least one method is required");
}

ExperimentSetup ExperimentConfig::setup() const {
  ExperimentSetup s = preset(experiment);
  for (auto& g : s.training) g.env = patched(g.env, env_overrides);
  s.test_env = patched(patched(s.test_env, env_overrides), test_env_overrides);
  s.replan = replan_config_from_json(replan_overrides, s.replan);
  s.dmp = dmp_config_from_json(dmp_overrides, s.dmp);
  if (!script_overrides.empty()) {
    json script = demos::to_json(s.script);
    script.merge_patch(script_overrides);
    s.script = demos::script_from_json(script);
  }
  return s;
}

ExperimentConfig experiment_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  ExperimentConfig cfg;
  cfg.experiment = parse_experiment(get_or<std::string>(j, "experiment", "replay"));
  if (j.contains("methods")) {
    cfg.methods.clear();
    for (const auto& m : get_or<std::vector<std::string>>(j, "methods", {})) {
      cfg.methods.push_back(parse_method(m));
    }
  } else if (j.contains("method")) {
    cfg.methods = {parse_method(get_or<std::string>(j, "method", ""))};
  }
  cfg.env_overrides = j.value("env", json::object());
  cfg.test_env_overrides = j.value("test_env", json::object());
  cfg.replan_overrides = j.value("replan", json::object());
  cfg.dmp_overrides = j.value("dmp", json::object());
  cfg.script_overrides = j.value("script", json::object());
  const auto n_runs = get_or<long long>(j, "n_runs", 7);
  if (n_runs < 1) throw ConfigError("n_runs must be at least 1");
  cfg.n_runs = static_cast<std::size_t>(n_runs);
  cfg.seed = get_or<std::uint64_t>(j, "seed", 0);
  cfg.out_dir = get_or<std::string>(j, "out", "results");
  cfg.validate();
  return cfg;
}

json to_json(const ExperimentConfig& cfg) {
  json methods = json::array();
  for (Method m : cfg.methods) methods.push_back(to_string(m));
  return {{"experiment", to_string(cfg.experiment)},
          {"methods", methods},
          {"env", cfg.env_overrides},
          {"test_env", cfg.test_env_overrides},
          {"replan", cfg.replan_overrides},
          {"dmp", cfg.dmp_overrides},
          {"script", cfg.script_overrides},
          {"n_runs", cfg.n_runs},
          {"seed", cfg.seed},
          {"out", cfg.out_dir.string()}};
}

json to_json(const force::ReplanConfig& c) {
  return {{"delta", c.delta},       {"coverage_ratio", c.coverage_ratio},
          {"gamma", c.gamma},       {"mix_lead", c.mix_lead},
          {"cond_lead", c.cond_lead}, {"cooldown", c.cooldown},
          {"obs_noise", c.obs_noise}, {"accumulate", c.accumulate},
          {"clip_sigma", c.clip_sigma}};
}

force::ReplanConfig replan_config_from_json(const json& j, force::ReplanConfig c) {
  c.delta = get_or(j, "delta", c.delta);
  c.coverage_ratio = get_or(j, "coverage_ratio", c.coverage_ratio);
  c.gamma = get_or(j, "gamma", c.gamma);
  c.mix_lead = get_or(j, "mix_lead", c.mix_lead);
  c.cond_lead = get_or(j, "cond_lead", c.cond_lead);
  c.cooldown = get_or(j, "cooldown", c.cooldown);
  c.obs_noise = get_or(j, "obs_noise", c.obs_noise);
  c.accumulate = get_or(j, "accumulate", c.accumulate);
  c.clip_sigma = get_or(j, "clip_sigma", c.clip_sigma);
  c.validate();
  return c;
}

json to_json(const mp::DmpConfig& c) {
  return {{"alpha", c.alpha},     {"beta", c.beta},
          {"alpha_x", c.alpha_x}, {"tau", c.tau},
          {"n_basis", c.n_basis}, {"basis_width", c.basis_width},
          {"substeps", c.substeps}};
}

mp::DmpConfig dmp_config_from_json(const json& j, mp::DmpConfig c) {
  c.alpha = get_or(j, "alpha", c.alpha);
  c.beta = get_or(j, "beta", c.beta);
  c.alpha_x = get_or(j, "alpha_x", c.alpha_x);
  c.tau = get_or(j, "tau", c.tau);
  c.n_basis = get_or(j, "n_basis", c.n_basis);
  c.basis_width = get_or(j, "basis_width", c.basis_width);
  c.substeps = get_or(j, "substeps", c.substeps);
  c.validate();
  return c;
}

std::uint64_t run_seed(std::uint64_t base_seed, std::size_t run) {
  return base_seed * 1000 + run;
}

demos::DemoDataset training_dataset(const ExperimentSetup& setup, std::uint64_t seed) {
  demos::DemoDataset ds;
  ds.task = to_string(setup.kind);
  for (std::size_t g = 0; g < setup.training.size(); ++g) {
    // Group seeds sit above the run seeds of the same base.
    const std::uint64_t group_seed = seed * 1000 + 100 * (g + 1);
    sim::EnvConfig env = setup.training[g].env;
    env.seed = group_seed;
    demos::DemoDataset part = demos::generate_demos(env, setup.script, setup.training[g].n_demos,
                                                    setup.jitter, group_seed, ds.task);
    for (auto& r : part.records) ds.records.push_back(std::move(r));
  }
  return ds;
}

std::vector<RunRow> ResultsTable::rows_for(Method m) const {
  std::vector<RunRow> out;
  for (const auto& r : rows) {
    if (r.method == m) out.push_back(r);
  }
  return out;
}

const MethodSummary& ResultsTable::summary(Method m) const {
  for (const auto& s : summaries) {
    if (s.method == m) return s;
  }
  throw PreconditionError("no results for method " + to_string(m));
}

std::vector<MethodSummary> summarize(const std::vector<RunRow>& rows,
                                     const std::vector<Method>& methods) {
  std::vector<MethodSummary> out;
  for (Method m : methods) {
    MethodSummary s;
    s.method = m;
    double err = 0.0;
    for (const auto& r : rows) {
      if (r.method != m) continue;
      ++s.runs;
      s.successes += r.inserted ? 1 : 0;
      err += r.position_error_mm;
      s.total_replans += r.replans;
    }
    if (s.runs > 0) {
      const auto n = static_cast<double>(s.runs);
      s.success_rate = static_cast<double>(s.successes) / n;
      s.mean_position_error_mm = err / n;
      s.mean_replans = static_cast<double>(s.total_replans) / n;
    }
    out.push_back(s);
  }
  return out;
}

ResultsTable run_experiment(const ExperimentConfig& cfg, const std::filesystem::path* log_dir) {
  cfg.validate();
  const ExperimentSetup setup = cfg.setup();
  const demos::DemoDataset ds = training_dataset(setup, cfg.seed);

  ResultsTable table;
  table.experiment = cfg.experiment;
  table.seat_depth_mm = setup.test_env.seat_depth() * 1e3;
  for (Method m : cfg.methods) {
    const Model model = fit_model(ds, m, setup.dmp);
    for (std::size_t i = 0; i < cfg.n_runs; ++i) {
      RunRow row;
      row.method = m;
      row.run = i;
      row.seed = run_seed(cfg.seed, i);
      sim::EnvConfig env = setup.test_env;
      env.seed = row.seed;
      const RunOutcome out = execute_method(model, env, row.seed, setup.replan);
      row.inserted = out.metrics.inserted;
      row.clicks = out.metrics.clicks;
      row.position_error_mm = out.metrics.final_position_error * 1e3;
      row.max_force = out.metrics.max_force;
      row.replans = out.log.events.size();
      row.demo_index = out.demo_index ? static_cast<long>(*out.demo_index) : -1;
      row.demo_matches = out.demo_matches;
      row.complete = out.log.complete;
      row.fault = out.log.fault;
      if (log_dir) {
        save_log(out.log, *log_dir / (to_string(m) + "_run" + std::to_string(i) + ".json"));
      }
      table.rows.push_back(std::move(row));
    }
  }
  table.summaries = summarize(table.rows, cfg.methods);
  return table;
}

ResultsTable run_experiment(const ExperimentConfig& cfg) { return run_experiment(cfg, nullptr); }

json to_json(const ResultsTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"method", to_string(r.method)},
                    {"run", r.run},
                    {"seed", r.seed},
                    {"inserted", r.inserted},
                    {"clicks", r.clicks},
                    {"position_error_mm", fmt(r.position_error_mm)},
                    {"max_force", fmt(r.max_force)},
                    {"replans", r.replans},
                    {"demo_index", r.demo_index},
                    {"demo_matches", r.demo_matches},
                    {"complete", r.complete},
                    {"fault", r.fault}});
  }
  json summaries = json::array();
  for (const auto& s : t.summaries) {
    summaries.push_back({{"method", to_string(s.method)},
                         {"runs", s.runs},
                         {"successes", s.successes},
                         {"success_rate", fmt(s.success_rate)},
                         {"mean_position_error_mm", fmt(s.mean_position_error_mm)},
                         {"mean_replans", fmt(s.mean_replans)},
                         {"total_replans", s.total_replans}});
  }
  return {{"experiment", to_string(t.experiment)},
          {"seat_depth_mm", fmt(t.seat_depth_mm)},
          {"summaries", summaries},
          {"runs", rows}};
}

std::string runs_csv(const ResultsTable& t) {
  std::string out =
      "method,run,seed,inserted,clicks,position_error_mm,max_force,replans,demo_index,"
      "demo_matches,complete\n";
  for (const auto& r : t.rows) {
    out += to_string(r.method) + ',' + std::to_string(r.run) + ',' + std::to_string(r.seed) +
           ',' + (r.inserted ? "1" : "0") + ',' + std::to_string(r.clicks) + ',' +
           fmt(r.position_error_mm) + ',' + fmt(r.max_force) + ',' + std::to_string(r.replans) +
           ',' + std::to_string(r.demo_index) + ',' + (r.demo_matches ? "1" : "0") + ',' +
           (r.complete ? "1" : "0") + '\n';
  }
  return out;
}

std::string summary_csv(const ResultsTable& t) {
  std::string out =
      "experiment,method,runs,successes,success_rate,mean_position_error_mm,mean_replans\n";
  for (const auto& s : t.summaries) {
    out += to_string(t.experiment) + ',' + to_string(s.method) + ',' + std::to_string(s.runs) +
           ',' + std::to_string(s.successes) + ',' + fmt(s.success_rate) + ',' +
           fmt(s.mean_position_error_mm) + ',' + fmt(s.mean_replans) + '\n';
  }
  return out;
}

void write_results(const ResultsTable& table, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (dir / name).string());
    out << text;
  };
  write("results.json", to_json(table).dump(1) + "\n");
  write("runs.csv", runs_csv(table));
  write("summary.csv", summary_csv(table));
}

}  // namespace famp::harness
