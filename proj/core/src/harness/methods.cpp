#include "famp/harness/methods.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "famp/error.hpp"
#include "famp/mp/dmp.hpp"
#include "famp/mp/fitting.hpp"
#include "famp/sim/simulator.hpp"

namespace famp::harness {

namespace {

std::size_t pick_demo(const Model& model, std::uint64_t seed) {
  const auto n = model.demos.records.size();
  if (n == 0) throw InsufficientDataError("model holds no demonstrations");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  return pick(rng);
}

bool demo_matches(const demos::DemoRecord& rec, const sim::EnvConfig& env) {
  const Eigen::VectorXd origin = env.origin();
  return rec.meta.k_plug == env.k_plug && rec.meta.socket_origin.size() == origin.size() &&
         (rec.meta.socket_origin - origin).cwiseAbs().maxCoeff() < 1e-12;
}

mp::InitialState start_state(const sim::EnvConfig& env, Eigen::Index n_force) {
  const Eigen::Index d = env.n_pos_dims;
  mp::InitialState init = mp::InitialState::zeros(d + n_force);
  init.position.head(d) = env.start_position();
  return init;
}

void check_compatible(const Model& model, const sim::EnvConfig& env) {
  env.validate();
  if (model.d_pos != env.n_pos_dims) {
    throw ConfigError("model has " + std::to_string(model.d_pos) +
                      " position dims, environment has " + std::to_string(env.n_pos_dims));
  }
  if (std::abs(model.grid.dt() - env.control_dt) > 1e-9) {
    throw ConfigError("model grid step differs from the environment control period");
  }
}

}  // namespace

mp::Trajectory planned_positions(const Model& model, const sim::EnvConfig& env,
                                 std::uint64_t seed, std::optional<std::size_t>* demo_index) {
  check_compatible(model, env);
  switch (model.method) {
    case Method::kCic: {
      const std::size_t i = pick_demo(model, seed);
      if (demo_index) *demo_index = i;
      return model.demos.records[i].position_trajectory();
    }
    case Method::kDmp: {
      const std::size_t i = pick_demo(model, seed);
      if (demo_index) *demo_index = i;
      const auto& rec = model.demos.records[i];
      const mp::Trajectory traj = rec.position_trajectory();
      const mp::BasisSystem basis =
          mp::build_basis(model.dmp, rec.grid, mp::BasisKind::kProDmp);
      const mp::WeightVector omega =
          mp::fit_weights(traj, basis, mp::InitialState::from_trajectory(traj));
      return mp::integrate_dmp(model.dmp, omega, start_state(env, 0), rec.grid);
    }
    case Method::kProMp:
    case Method::kProDmp:
    case Method::kFaProDmp: {
      const mp::Trajectory mean =
          mp::compose_mean(model.basis(), model.weights->mean(), start_state(env, model.f_force));
      return mean.columns(0, model.d_pos);
    }
  }
  throw ConfigError("unknown method");
}

RunOutcome execute_method(const Model& model, const sim::EnvConfig& env,
                          std::uint64_t seed, const force::ReplanConfig& replan) {
  check_compatible(model, env);
  RunOutcome out;
  const std::size_t required = env.clicks_required();

  if (model.method == Method::kFaProDmp) {
    if (model.f_force != env.n_pos_dims) {
      throw ConfigError("model force dims do not match the environment");
    }
    sim::Simulator sim(env);
    force::MonitorOptions options;
    options.replan = replan;
    out.log = force::execute_with_monitor(sim, *model.weights, model.basis(),
                                          start_state(env, model.f_force), model.layout(),
                                          options);
    double max_force = 0.0;
    for (const auto& rec : out.log.records) {
      max_force = std::max(max_force, rec.measured_force.norm());
    }
    out.metrics = sim::evaluate(sim.state().position, sim.state().passed_detents, max_force,
                                out.log.complete, env, required);
    return out;
  }

  const mp::Trajectory plan = planned_positions(model, env, seed, &out.demo_index);
  if (out.demo_index) {
    out.demo_matches = demo_matches(model.demos.records[*out.demo_index], env);
  }
  const sim::EpisodeLog episode =
      sim::run_episode(env, sim::TrajectoryProvider(plan, env.n_pos_dims));
  out.metrics = sim::metrics(episode, env, required);
  out.log.complete = episode.complete;
  out.log.fault = episode.fault;
  out.log.records.reserve(episode.records.size());
  for (const auto& r : episode.records) {
    force::StepRecord rec;
    rec.t = r.t;
    rec.desired_position = r.desired;
    rec.actual_position = r.position;
    rec.measured_force = r.measured_force;
    out.log.records.push_back(std::move(rec));
  }
  return out;
}

}  // namespace famp::harness
