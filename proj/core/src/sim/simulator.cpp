#include "famp/sim/simulator.hpp"

#include <cmath>
#include <string>

#include "famp/error.hpp"
#include "famp/sim/contact.hpp"

namespace famp::sim {

SimState initial_state(const EnvConfig& cfg) {
  cfg.validate();
  return SimState{cfg.start_position(), Eigen::VectorXd::Zero(cfg.n_pos_dims), 0, 0.0};
}

double depth_of(const Eigen::VectorXd& position, const EnvConfig& cfg) {
  return (position - cfg.origin()).dot(cfg.axis());
}

Eigen::VectorXd contact_force(const SimState& state, const EnvConfig& cfg) {
  const Eigen::VectorXd axis = cfg.axis();
  const Eigen::VectorXd rel = state.position - cfg.origin();
  const double depth = rel.dot(axis);
  Eigen::VectorXd force = Eigen::VectorXd::Zero(cfg.n_pos_dims);
  if (depth <= 0.0 && state.passed_detents == 0) return force;
  force -= contact_resistance(depth, state.passed_detents, cfg) * axis;
  force -= cfg.lateral_stiffness * (rel - depth * axis);
  return force;
}

PhysicsStep physics_step(const SimState& state, const Eigen::VectorXd& desired_pos,
                         const Eigen::VectorXd& desired_vel, const EnvConfig& cfg) {
  const Eigen::VectorXd control = cfg.kp * (desired_pos - state.position) +
                                  cfg.damping() * (desired_vel - state.velocity);
  const Eigen::VectorXd accel = (control + contact_force(state, cfg)) / cfg.mass;

  PhysicsStep out;
  out.state.velocity = state.velocity + cfg.dt * accel;
  out.state.position = state.position + cfg.dt * out.state.velocity;
  out.state.t = state.t + cfg.dt;
  out.state.passed_detents = state.passed_detents;
  if (!out.state.position.allFinite() || !out.state.velocity.allFinite()) {
    throw EnvironmentFault("simulation state became non-finite at t = " +
                           std::to_string(out.state.t));
  }
  const double depth = depth_of(out.state.position, cfg);
  while (out.state.passed_detents < cfg.detents.size() &&
         depth >= cfg.detents[out.state.passed_detents].depth) {
    ++out.state.passed_detents;
  }
  out.contact_force = contact_force(out.state, cfg);
  return out;
}

Simulator::Simulator(EnvConfig cfg)
    : cfg_(std::move(cfg)),
      state_(initial_state(cfg_)),
      contact_(Eigen::VectorXd::Zero(cfg_.n_pos_dims)),
      measured_(Eigen::VectorXd::Zero(cfg_.n_pos_dims)),
      rng_(cfg_.seed),
      noise_(0.0, 1.0) {}

Eigen::VectorXd Simulator::step(const Eigen::VectorXd& desired_pos,
                                const Eigen::VectorXd& desired_vel) {
  if (desired_pos.size() != cfg_.n_pos_dims || desired_vel.size() != cfg_.n_pos_dims) {
    throw ShapeError("setpoint dimension does not match the environment");
  }
  PhysicsStep next = physics_step(state_, desired_pos, desired_vel, cfg_);
  state_ = std::move(next.state);
  contact_ = std::move(next.contact_force);
  measured_ = contact_;
  if (cfg_.sensor_noise_std > 0.0) {
    for (Eigen::Index i = 0; i < measured_.size(); ++i) {
      measured_[i] += cfg_.sensor_noise_std * noise_(rng_);
    }
  }
  return measured_;
}

force::Observation Simulator::observe() const {
  return {state_.t, state_.position, state_.velocity, measured_};
}

force::Observation Simulator::apply(const Eigen::VectorXd& desired_pos,
                                    const Eigen::VectorXd& desired_vel) {
  const std::size_t n = cfg_.substeps_per_control();
  for (std::size_t i = 0; i < n; ++i) step(desired_pos, desired_vel);
  return observe();
}

TrajectoryProvider::TrajectoryProvider(mp::Trajectory traj, Eigen::Index n_pos_dims)
    : traj_(std::move(traj)), n_pos_dims_(n_pos_dims) {
  if (n_pos_dims_ < 1 || n_pos_dims_ > traj_.n_dims()) {
    throw ShapeError("trajectory has fewer columns than position dims");
  }
}

std::size_t TrajectoryProvider::size() const { return traj_.grid().size(); }

Eigen::VectorXd TrajectoryProvider::position(std::size_t step) const {
  return traj_.values().row(static_cast<Eigen::Index>(step)).head(n_pos_dims_).transpose();
}

EpisodeLog run_episode(const EnvConfig& cfg, const DesiredProvider& provider) {
  Simulator sim(cfg);
  EpisodeLog log;
  const std::size_t n = provider.size();
  if (n < 2) throw ConfigError("episode needs at least two setpoints");
  log.records.reserve(n);

  auto record = [&](double t, const Eigen::VectorXd& desired) {
    log.records.push_back({t, desired, sim.state().position, sim.last_contact_force(),
                           sim.observe().measured_force});
  };
  record(0.0, provider.position(0));
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Eigen::VectorXd des = provider.position(k);
    const Eigen::VectorXd vel = (provider.position(k + 1) - des) / cfg.control_dt;
    try {
      sim.apply(des, vel);
    } catch (const EnvironmentFault& fault) {
      log.complete = false;
      log.fault = fault.what();
      break;
    }
    record(static_cast<double>(k + 1) * cfg.control_dt, provider.position(k + 1));
  }
  log.final_state = sim.state();
  return log;
}

}  // namespace famp::sim
