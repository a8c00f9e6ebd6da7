#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "famp/force/monitor.hpp"
#include "famp/mp/time_grid.hpp"
#include "famp/sim/env_config.hpp"

namespace famp::sim {

struct SimState {
  Eigen::VectorXd position;
  Eigen::VectorXd velocity;
  std::size_t passed_detents = 0;
  double t = 0.0;
};

struct PhysicsStep {
  SimState state;
  /// Contact force on the end-effector at the new state (noise free).
  Eigen::VectorXd contact_force;
};

SimState initial_state(const EnvConfig& cfg);

/// Depth of `position` along the channel axis.
double depth_of(const Eigen::VectorXd& position, const EnvConfig& cfg);

/// Contact force vector at a state: axial resistance opposing insertion plus
/// a lateral centring spring while inside the channel.
Eigen::VectorXd contact_force(const SimState& state, const EnvConfig& cfg);

/// One semi-implicit Euler step of length cfg.dt under the impedance law
/// u = kp (x_d - x) + kd (v_d - v). Throws EnvironmentFault on non-finite
/// state.
PhysicsStep physics_step(const SimState& state, const Eigen::VectorXd& desired_pos,
                         const Eigen::VectorXd& desired_vel, const EnvConfig& cfg);

/// Stateful simulator with a seeded force sensor. One instance per episode.
class Simulator : public force::EnvironmentHandle {
 public:
  explicit Simulator(EnvConfig cfg);

  const EnvConfig& config() const { return cfg_; }
  const SimState& state() const { return state_; }
  const Eigen::VectorXd& last_contact_force() const { return contact_; }

  /// One physics step; returns the noisy measured force.
  Eigen::VectorXd step(const Eigen::VectorXd& desired_pos,
                       const Eigen::VectorXd& desired_vel);

  Eigen::Index n_pos_dims() const override { return cfg_.n_pos_dims; }
  Eigen::Index n_force_dims() const override { return cfg_.n_pos_dims; }
  double control_dt() const override { return cfg_.control_dt; }
  force::Observation observe() const override;
  force::Observation apply(const Eigen::VectorXd& desired_pos,
                           const Eigen::VectorXd& desired_vel) override;

 private:
  EnvConfig cfg_;
  SimState state_;
  Eigen::VectorXd contact_;
  Eigen::VectorXd measured_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> noise_;
};

struct EpisodeRecord {
  double t = 0.0;
  Eigen::VectorXd desired;
  Eigen::VectorXd position;
  Eigen::VectorXd contact_force;
  Eigen::VectorXd measured_force;
};

struct EpisodeLog {
  std::vector<EpisodeRecord> records;
  SimState final_state;
  bool complete = true;
  std::string fault;
};

/// Supplies the setpoint for each control period.
class DesiredProvider {
 public:
  virtual ~DesiredProvider() = default;
  /// Number of grid points; the episode runs size() - 1 control periods.
  virtual std::size_t size() const = 0;
  virtual Eigen::VectorXd position(std::size_t step) const = 0;
};

/// Plays back the first n_pos_dims columns of a trajectory.
class TrajectoryProvider : public DesiredProvider {
 public:
  explicit TrajectoryProvider(mp::Trajectory traj, Eigen::Index n_pos_dims);
  std::size_t size() const override;
  Eigen::VectorXd position(std::size_t step) const override;

 private:
  mp::Trajectory traj_;
  Eigen::Index n_pos_dims_;
};

/// Runs the provider's setpoints (velocity by forward difference, held for
/// one control period each) from the configured start state.
EpisodeLog run_episode(const EnvConfig& cfg, const DesiredProvider& provider);

}  // namespace famp::sim
