#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "famp/mp/time_grid.hpp"
#include "famp/sim/env_config.hpp"

namespace famp::demos {

/// Timing of the scripted compliant push, all in seconds from the start.
/// approach to the mouth -> push until the setpoint leads the seat by
/// push_factor * peak / kp -> hold -> back off to the seated setpoint -> hold.
struct DemoScript {
  double duration = 5.0;
  double t_approach = 1.0;
  double t_push = 3.2;
  double t_release = 4.0;
  double t_settle = 4.6;
  double push_factor = 1.2;
  /// When positive, the approach runs at this speed (m/s) and ends when the
  /// mouth is reached instead of at t_approach; the later phases shift by the
  /// same amount.
  double approach_speed = 0.0;

  void validate() const;
  /// End of the approach for a given start and mouth depth.
  double approach_end(double start_depth, double mouth_depth) const;
  bool operator==(const DemoScript&) const = default;
};

/// Per-demo variation.
struct DemoJitter {
  /// Std of the mouth waypoint along the axis, m.
  double position_std = 0.002;
  /// Relative std of the push amplitude.
  double slope_rel = 0.05;
};

struct DemoMeta {
  std::string env_hash;
  double k_plug = 0.0;
  Eigen::VectorXd socket_origin;
  std::uint64_t seed = 0;
  nlohmann::json script;
};

struct DemoRecord {
  mp::TimeGrid grid;
  Eigen::MatrixXd positions;  ///< commanded positions [n_steps x D]
  Eigen::MatrixXd forces;     ///< measured forces [n_steps x F]
  DemoMeta meta;

  mp::Trajectory position_trajectory() const { return {grid, positions}; }
  mp::Trajectory force_trajectory() const { return {grid, forces}; }
  /// Positions then forces.
  mp::Trajectory joint_trajectory() const;
};

struct DemoDataset {
  static constexpr int kSchemaVersion = 1;
  int schema_version = kSchemaVersion;
  std::string task;
  std::vector<DemoRecord> records;

  void validate() const;
};

/// Setpoint trajectory of one scripted demonstration (world coordinates).
mp::Trajectory scripted_setpoints(const sim::EnvConfig& cfg, const DemoScript& script,
                                  double mouth_offset, double push_scale);

/// Runs n scripted pushes in `cfg`. Record i draws its jitter from
/// seed + i; the sensor noise stream is the environment's own seed.
/// Throws GenerationError if any record fails to insert.
DemoDataset generate_demos(const sim::EnvConfig& cfg, const DemoScript& script,
                           std::size_t n, const DemoJitter& jitter,
                           std::uint64_t seed, const std::string& task = "");

nlohmann::json to_json(const DemoScript& script);
DemoScript script_from_json(const nlohmann::json& j);

}  // namespace famp::demos
