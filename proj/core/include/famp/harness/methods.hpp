#pragma once

#include <cstdint>
#include <optional>

#include "famp/force/monitor.hpp"
#include "famp/force/replanning.hpp"
#include "famp/harness/model.hpp"
#include "famp/sim/env_config.hpp"
#include "famp/sim/metrics.hpp"

namespace famp::harness {

struct RunOutcome {
  sim::Metrics metrics;
  /// Uniform trace for every method; expected force columns are empty for
  /// methods without a force model.
  force::ExecutionLog log;
  /// Demonstration replayed or encoded by CIC and DMP.
  std::optional<std::size_t> demo_index;
  /// True when that demonstration came from an environment with the test
  /// environment's plug stiffness and socket pose.
  bool demo_matches = false;
};

/// Executes one run of `model` in `env`. `seed` picks the demonstration for
/// CIC and DMP; the environment uses its own seed for sensor noise.
/// Only faprodmp runs the force monitor.
RunOutcome execute_method(const Model& model, const sim::EnvConfig& env,
                          std::uint64_t seed, const force::ReplanConfig& replan);

/// Desired position trajectory a non-monitored method would command,
/// starting from the environment's start pose.
mp::Trajectory planned_positions(const Model& model, const sim::EnvConfig& env,
                                 std::uint64_t seed,
                                 std::optional<std::size_t>* demo_index = nullptr);

}  // namespace famp::harness
