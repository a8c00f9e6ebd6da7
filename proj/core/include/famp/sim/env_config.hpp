#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace famp::sim {

enum class Orientation { kVertical, kHorizontal };

/// One snap-through slot in the channel.
struct Detent {
  double depth = 0.0;       ///< m from the channel mouth
  double peak_scale = 1.0;  ///< multiplies k_plug for this slot's ramp

  bool operator==(const Detent&) const = default;
};

/// Compliant insertion task: a point end-effector under impedance control
/// pushed into a channel with detents.
struct EnvConfig {
  int n_pos_dims = 2;
  Orientation orientation = Orientation::kVertical;
  /// Channel mouth in world coordinates (size n_pos_dims). Empty = origin.
  Eigen::VectorXd socket_origin;
  /// Unit insertion direction. Empty = derived from the orientation.
  Eigen::VectorXd channel_axis;
  std::vector<Detent> detents{{0.008, 1.0}, {0.016, 1.0}, {0.024, 1.0}};
  double k_plug = 400.0;
  double residual_ratio = 0.3;
  double lateral_stiffness = 2000.0;
  double kp = 30.0;
  /// Non-positive selects critical damping 2 sqrt(kp * mass).
  double kd = 0.0;
  double mass = 0.2;
  double sensor_noise_std = 0.02;
  double dt = 1e-3;
  double control_dt = 1e-2;
  std::uint64_t seed = 0;
  /// Start pose: this far along the axis from the mouth (negative = outside).
  double start_depth = -0.03;
  /// Clicks needed for a successful insertion; 0 means every detent.
  std::size_t required_clicks = 0;

  void validate() const;
  Eigen::VectorXd origin() const;
  Eigen::VectorXd axis() const;
  Eigen::VectorXd start_position() const;
  double damping() const;
  std::size_t substeps_per_control() const;
  std::size_t clicks_required() const;
  /// k_plug * peak_scale * (depth_i - depth_{i-1}).
  double peak(std::size_t i) const;
  double max_peak() const;
  /// Depth of the detent that completes the task.
  double seat_depth() const;
  Eigen::VectorXd seat_point() const;
};

nlohmann::json to_json(const EnvConfig& cfg);
/// Missing keys keep their defaults; unknown orientation strings throw
/// ConfigError.
EnvConfig env_config_from_json(const nlohmann::json& j);

/// FNV-1a hash of the canonical JSON form, as 16 hex digits.
std::string env_hash(const EnvConfig& cfg);

}  // namespace famp::sim
