#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "famp/sim/env_config.hpp"
#include "famp/sim/simulator.hpp"

namespace famp::sim {

struct Metrics {
  /// Distance from the final position to the seat point, m.
  double final_position_error = 0.0;
  bool inserted = false;
  std::size_t clicks = 0;
  /// Largest measured force norm, N.
  double max_force = 0.0;
  /// Set when the log was cut short by a fault.
  bool incomplete = false;
};

Metrics evaluate(const Eigen::VectorXd& final_position, std::size_t clicks,
                 double max_force, bool complete, const EnvConfig& cfg,
                 std::size_t required_clicks);

Metrics metrics(const EpisodeLog& log, const EnvConfig& cfg,
                std::size_t required_clicks);

}  // namespace famp::sim
