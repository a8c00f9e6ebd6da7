#include "famp/mp/time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "famp/error.hpp"

namespace famp::mp {

TimeGrid::TimeGrid(double duration, std::size_t n_steps)
    : duration_(duration), n_steps_(n_steps) {
  if (n_steps_ < 2) {
    throw ConfigError("TimeGrid needs at least 2 steps, got " +
                      std::to_string(n_steps_));
  }
  if (!(duration_ > 0.0) || !std::isfinite(duration_)) {
    throw ConfigError("TimeGrid duration must be positive and finite");
  }
}

TimeGrid TimeGrid::from_dt(double duration, double dt) {
  if (!(dt > 0.0)) throw ConfigError("TimeGrid dt must be positive");
  const double intervals = duration / dt;
  const auto rounded = static_cast<std::size_t>(std::llround(intervals));
  if (rounded == 0 || std::abs(intervals - static_cast<double>(rounded)) > 1e-6) {
    throw ConfigError("duration is not a multiple of dt");
  }
  return TimeGrid(duration, rounded + 1);
}

Eigen::VectorXd TimeGrid::times() const {
  Eigen::VectorXd t(static_cast<Eigen::Index>(n_steps_));
  for (std::size_t i = 0; i < n_steps_; ++i) t[static_cast<Eigen::Index>(i)] = time(i);
  return t;
}

std::size_t TimeGrid::nearest_index(double t) const {
  const double idx = std::round(t / dt());
  if (idx <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(idx), n_steps_ - 1);
}

Trajectory::Trajectory(TimeGrid grid, Eigen::MatrixXd values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.rows() != static_cast<Eigen::Index>(grid_.size())) {
    throw ShapeError("trajectory has " + std::to_string(values_.rows()) +
                     " rows but grid has " + std::to_string(grid_.size()) +
                     " steps");
  }
  if (values_.cols() < 1) throw ShapeError("trajectory needs at least one dimension");
  if (!values_.allFinite()) throw NumericError("trajectory contains non-finite values");
}

Trajectory Trajectory::columns(Eigen::Index first, Eigen::Index count) const {
  if (first < 0 || count < 1 || first + count > n_dims()) {
    throw ShapeError("column range out of bounds");
  }
  return Trajectory(grid_, values_.middleCols(first, count));
}

InitialState InitialState::zeros(Eigen::Index n_dims) {
  return {Eigen::VectorXd::Zero(n_dims), Eigen::VectorXd::Zero(n_dims)};
}

InitialState InitialState::from_trajectory(const Trajectory& traj) {
  const auto& v = traj.values();
  return {v.row(0).transpose(),
          ((v.row(1) - v.row(0)) / traj.grid().dt()).transpose()};
}

void InitialState::validate(Eigen::Index expected_dims) const {
  if (position.size() != expected_dims || velocity.size() != expected_dims) {
    throw ShapeError("initial state has " + std::to_string(position.size()) +
                     " dims, expected " + std::to_string(expected_dims));
  }
  if (!position.allFinite() || !velocity.allFinite()) {
    throw NumericError("initial state is not finite");
  }
}

}  // namespace famp::mp
