#pragma once

#include <cstddef>

#include <Eigen/Core>

namespace famp::mp {

/// Uniform sampling of [0, duration] with n_steps points (both ends included).
class TimeGrid {
 public:
  TimeGrid(double duration, std::size_t n_steps);

  /// Grid whose spacing is `dt`; duration must be an integer multiple of dt
  /// up to rounding.
  static TimeGrid from_dt(double duration, double dt);

  double duration() const { return duration_; }
  std::size_t size() const { return n_steps_; }
  double dt() const { return duration_ / static_cast<double>(n_steps_ - 1); }
  double time(std::size_t i) const { return dt() * static_cast<double>(i); }
  Eigen::VectorXd times() const;

  /// Index of the grid point closest to t (clamped to the grid).
  std::size_t nearest_index(double t) const;

  bool operator==(const TimeGrid& other) const = default;

 private:
  double duration_;
  std::size_t n_steps_;
};

/// Sampled multi-dimensional trajectory, one row per grid step.
class Trajectory {
 public:
  Trajectory(TimeGrid grid, Eigen::MatrixXd values);

  const TimeGrid& grid() const { return grid_; }
  const Eigen::MatrixXd& values() const { return values_; }
  Eigen::Index n_dims() const { return values_.cols(); }
  Eigen::Index n_steps() const { return values_.rows(); }

  /// Columns [first, first + count).
  Trajectory columns(Eigen::Index first, Eigen::Index count) const;

 private:
  TimeGrid grid_;
  Eigen::MatrixXd values_;
};

/// Position and velocity the primitive starts from.
struct InitialState {
  Eigen::VectorXd position;
  Eigen::VectorXd velocity;

  static InitialState zeros(Eigen::Index n_dims);
  /// Start state read off a trajectory: first sample and forward difference.
  static InitialState from_trajectory(const Trajectory& traj);
  Eigen::Index n_dims() const { return position.size(); }
  void validate(Eigen::Index expected_dims) const;
};

}  // namespace famp::mp
