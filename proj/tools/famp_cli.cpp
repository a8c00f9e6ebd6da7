#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "famp/harness/commands.hpp"

namespace {

struct Flags {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  std::string method;
  std::string input;
};

famp::harness::CommandOptions to_options(const Flags& f, const CLI::App& sub) {
  famp::harness::CommandOptions opt;
  opt.config = f.config;
  if (sub.count("--seed") > 0) opt.seed = f.seed;
  opt.out = f.out;
  opt.method = f.method;
  opt.input = f.input;
  return opt;
}

void common_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON configuration file");
  sub->add_option("--seed", f.seed, "Base seed");
  sub->add_option("--out", f.out, "Output file or directory");
  sub->add_option("--method", f.method, "cic|dmp|promp|prodmp|faprodmp")
      ->check(CLI::IsMember({"cic", "dmp", "promp", "prodmp", "faprodmp"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Force-aware movement primitives: demos, fitting, execution, experiments"};
  app.require_subcommand(1);
  Flags flags;

  auto* demo_gen = app.add_subcommand("demo-gen", "Generate scripted demonstrations");
  common_flags(demo_gen, flags);

  auto* fit = app.add_subcommand("fit", "Fit a model to a demonstration dataset");
  common_flags(fit, flags);
  fit->add_option("dataset", flags.input, "Dataset file")->required();

  auto* execute = app.add_subcommand("execute", "Execute a model in a simulated environment");
  common_flags(execute, flags);
  execute->add_option("model", flags.input, "Model file")->required();

  auto* experiment = app.add_subcommand("experiment", "Run an experiment over all methods");
  common_flags(experiment, flags);

  auto* plots = app.add_subcommand("export-plots", "Export an execution log as CSV series");
  common_flags(plots, flags);
  plots->add_option("log", flags.input, "Execution log (log.json)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : famp::harness::kExitConfig;
  }

  using namespace famp::harness;
  if (*demo_gen) return cmd_demo_gen(to_options(flags, *demo_gen), std::cout, std::cerr);
  if (*fit) return cmd_fit(to_options(flags, *fit), std::cout, std::cerr);
  if (*execute) return cmd_execute(to_options(flags, *execute), std::cout, std::cerr);
  if (*experiment) return cmd_experiment(to_options(flags, *experiment), std::cout, std::cerr);
  return cmd_export_plots(to_options(flags, *plots), std::cout, std::cerr);
}
