#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace famp::harness {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitGeneration = 3,
  kExitData = 4,
  kExitEnvironment = 5,
};

/// Maps a famp exception (or any std::exception) to its exit code.
int exit_code_for(const std::exception& e);

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out;
  std::string method;
  /// Extra positional inputs: dataset for fit, model for execute, log for
  /// export-plots.
  std::filesystem::path input;
};

/// Each command reports progress on `out`, errors on `err`, and returns an
/// exit code instead of throwing.
int cmd_demo_gen(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_fit(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_execute(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_experiment(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_export_plots(const CommandOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace famp::harness
