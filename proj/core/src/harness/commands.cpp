#include "famp/harness/commands.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "famp/demos/dataset.hpp"
#include "famp/error.hpp"
#include "famp/harness/experiment.hpp"
#include "famp/harness/methods.hpp"
#include "famp/harness/model.hpp"
#include "famp/harness/plots.hpp"

namespace famp::harness {

namespace {

using nlohmann::json;

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::filesystem::path require_path(const std::filesystem::path& p, const char* what) {
  if (p.empty()) throw ConfigError(std::string("missing ") + what);
  return p;
}

void ensure_parent(const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

std::string mm(double m) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", m * 1e3);
  return buf;
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const EnvironmentFault*>(&e)) return kExitEnvironment;
  if (dynamic_cast<const GenerationError*>(&e)) return kExitGeneration;
  if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
  if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) return kExitConfig;
  if (dynamic_cast<const Error*>(&e)) return kExitData;
  return kExitConfig;
}

int cmd_demo_gen(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const json cfg = read_json(require_path(opt.config, "--config"));
    const auto path = require_path(opt.out, "--out");
    demos::DemoDataset ds;
    if (cfg.contains("experiment")) {
      ExperimentConfig ec = experiment_config_from_json(cfg);
      ds = training_dataset(ec.setup(), opt.seed.value_or(ec.seed));
    } else {
      const sim::EnvConfig env = sim::env_config_from_json(cfg.value("env", json::object()));
      const demos::DemoScript script = demos::script_from_json(cfg.value("script", json::object()));
      demos::DemoJitter jitter;
      const json jj = cfg.value("jitter", json::object());
      try {
        jitter.position_std = jj.value("position_std", jitter.position_std);
        jitter.slope_rel = jj.value("slope_rel", jitter.slope_rel);
        const auto n = cfg.value("n", 7LL);
        if (n < 1) throw ConfigError("n must be at least 1");
        ds = demos::generate_demos(env, script, static_cast<std::size_t>(n), jitter,
                                   opt.seed.value_or(cfg.value("seed", std::uint64_t{0})),
                                   cfg.value("task", std::string()));
      } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid demo config: ") + e.what());
      }
    }
    ensure_parent(path);
    demos::save_dataset(ds, path);
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
      out << "record " << i << ": inserted (k_plug " << ds.records[i].meta.k_plug << ")\n";
    }
    out << ds.records.size() << " records written to " << path.string() << '\n';
    return kExitOk;
  });
}

int cmd_fit(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Method method = parse_method(opt.method.empty() ? "faprodmp" : opt.method);
    const auto path = require_path(opt.out, "--out");
    mp::DmpConfig dmp;
    if (!opt.config.empty()) {
      dmp = dmp_config_from_json(read_json(opt.config).value("dmp", json::object()));
    }
    const demos::DemoDataset ds = demos::load_dataset(require_path(opt.input, "dataset path"));
    const Model model = fit_model(ds, method, dmp);
    ensure_parent(path);
    save_model(model, path);
    out << "fitted " << to_string(method) << " on " << ds.records.size() << " records";
    if (model.weights) out << " (" << model.weights->mean().size() << " weights)";
    out << "; model written to " << path.string() << '\n';
    return kExitOk;
  });
}

int cmd_execute(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const json cfg = read_json(require_path(opt.config, "--config"));
    const auto dir = require_path(opt.out, "--out");
    Model model = load_model(require_path(opt.input, "model path"));
    if (!opt.method.empty() && parse_method(opt.method) != model.method) {
      throw ConfigError("model was fitted for " + to_string(model.method) + ", not " +
                        opt.method);
    }
    sim::EnvConfig env = sim::env_config_from_json(cfg.value("env", json::object()));
    const std::uint64_t seed = opt.seed.value_or(cfg.value("seed", std::uint64_t{0}));
    env.seed = seed;
    const json replan_json = cfg.value("replan", json::object());
    force::ReplanConfig replan = replan_config_from_json(replan_json);
    if (!replan_json.contains("delta") && model.trigger_delta > 0.0) {
      replan.delta = model.trigger_delta;
    }
    const RunOutcome run = execute_method(model, env, seed, replan);

    std::filesystem::create_directories(dir);
    save_log(run.log, dir / "log.json");
    const json metrics{{"method", to_string(model.method)},
                       {"seed", seed},
                       {"inserted", run.metrics.inserted},
                       {"clicks", run.metrics.clicks},
                       {"final_position_error_mm", mm(run.metrics.final_position_error)},
                       {"max_force", run.metrics.max_force},
                       {"incomplete", run.metrics.incomplete},
                       {"replans", run.log.events.size()},
                       {"demo_index", run.demo_index ? static_cast<long>(*run.demo_index) : -1}};
    std::ofstream(dir / "metrics.json", std::ios::binary) << metrics.dump(1) << '\n';
    out << to_string(model.method) << ": inserted=" << (run.metrics.inserted ? "yes" : "no")
        << " clicks=" << run.metrics.clicks
        << " error_mm=" << mm(run.metrics.final_position_error)
        << " replans=" << run.log.events.size() << '\n';
    if (!run.log.complete) {
      err << "environment fault: " << run.log.fault << '\n';
      return static_cast<int>(kExitEnvironment);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_experiment(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ExperimentConfig cfg = experiment_config_from_json(read_json(require_path(opt.config, "--config")));
    if (opt.seed) cfg.seed = *opt.seed;
    if (!opt.out.empty()) cfg.out_dir = opt.out;
    if (!opt.method.empty()) cfg.methods = {parse_method(opt.method)};
    const auto log_dir = cfg.out_dir / "logs";
    std::filesystem::create_directories(log_dir);
    const ResultsTable table = run_experiment(cfg, &log_dir);
    write_results(table, cfg.out_dir);
    out << to_string(table.experiment) << " (seat depth " << table.seat_depth_mm << " mm)\n";
    for (const auto& s : table.summaries) {
      char line[160];
      std::snprintf(line, sizeof line, "  %-9s success %zu/%zu  mean error %8.3f mm  replans %zu\n",
                    to_string(s.method).c_str(), s.successes, s.runs, s.mean_position_error_mm,
                    s.total_replans);
      out << line;
    }
    out << "results written to " << cfg.out_dir.string() << '\n';
    return kExitOk;
  });
}

int cmd_export_plots(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const auto log = load_log(require_path(opt.input, "log path"));
    const auto files = export_plots(log, require_path(opt.out, "--out"));
    for (const auto& f : files) out << f.string() << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace famp::harness
