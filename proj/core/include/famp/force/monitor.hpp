#pragma once

#include <vector>

#include <Eigen/Core>

#include "famp/force/replanning.hpp"
#include "famp/mp/basis.hpp"
#include "famp/mp/distribution.hpp"

namespace famp::force {

struct Observation {
  double t = 0.0;
  Eigen::VectorXd position;
  Eigen::VectorXd velocity;
  Eigen::VectorXd measured_force;
};

/// Something that can be driven one control period at a time.
class EnvironmentHandle {
 public:
  virtual ~EnvironmentHandle() = default;
  virtual Eigen::Index n_pos_dims() const = 0;
  virtual Eigen::Index n_force_dims() const = 0;
  virtual double control_dt() const = 0;
  virtual Observation observe() const = 0;
  /// Hold the setpoint for one control period and report the result.
  virtual Observation apply(const Eigen::VectorXd& desired_pos,
                            const Eigen::VectorXd& desired_vel) = 0;
};

struct StepRecord {
  double t = 0.0;
  Eigen::VectorXd desired_position;
  Eigen::VectorXd actual_position;
  Eigen::VectorXd expected_force;
  Eigen::VectorXd expected_force_std;
  Eigen::VectorXd measured_force;
  bool replanned = false;
};

struct ExecutionLog {
  std::vector<StepRecord> records;
  std::vector<ReplanEvent> events;
  /// False when the environment faulted before the end of the trajectory.
  bool complete = true;
  std::string fault;
};

struct MonitorOptions {
  ReplanConfig replan;
  bool enable_replanning = true;
};

/// Tracks the position columns of the primitive's mean trajectory in `env`.
/// After every control period the measured force is compared with the force
/// columns of the current desired trajectory; a trigger outside the cooldown
/// replans from the current commanded state and swaps the desired trajectory.
ExecutionLog execute_with_monitor(EnvironmentHandle& env,
                                  const mp::WeightDistribution& wd,
                                  const mp::BasisSystem& basis,
                                  const mp::InitialState& init,
                                  const JointSpaceConfig& layout,
                                  const MonitorOptions& options);

}  // namespace famp::force
