#include "famp/force/monitor.hpp"

#include <cmath>
#include <optional>

#include "famp/error.hpp"
#include "famp/mp/fitting.hpp"

namespace famp::force {

namespace {

Eigen::VectorXd slice(const mp::Trajectory& traj, Eigen::Index step,
                      Eigen::Index first, Eigen::Index count) {
  return traj.values().row(step).segment(first, count).transpose();
}

}  // namespace

ExecutionLog execute_with_monitor(EnvironmentHandle& env,
                                  const mp::WeightDistribution& wd,
                                  const mp::BasisSystem& basis,
                                  const mp::InitialState& init,
                                  const JointSpaceConfig& layout,
                                  const MonitorOptions& options) {
  layout.validate();
  options.replan.validate();
  if (env.n_pos_dims() != layout.d_pos || env.n_force_dims() != layout.f_force) {
    throw ShapeError("environment dimensions do not match the joint layout");
  }
  const auto& grid = basis.grid();
  if (std::abs(env.control_dt() - grid.dt()) > 1e-9) {
    throw ConfigError("environment control period differs from the trajectory grid");
  }

  const Eigen::Index D = layout.d_pos;
  const Eigen::Index F = layout.f_force;
  const double dt = grid.dt();

  mp::Trajectory lam = mp::compose_mean(basis, wd.mean(), init);
  Eigen::MatrixXd force_std =
      mp::marginal_variances(wd, basis).rightCols(F).cwiseSqrt();
  Replanner replanner(wd, basis, init, layout, options.replan);

  ExecutionLog log;
  const auto n_steps = static_cast<Eigen::Index>(grid.size());
  log.records.reserve(static_cast<std::size_t>(n_steps));

  Observation obs = env.observe();
  auto record = [&](Eigen::Index k, const Observation& o) {
    StepRecord rec;
    rec.t = grid.time(static_cast<std::size_t>(k));
    rec.desired_position = slice(lam, k, 0, D);
    rec.actual_position = o.position;
    rec.expected_force = slice(lam, k, D, F);
    rec.expected_force_std = force_std.row(k).transpose();
    rec.measured_force = o.measured_force;
    log.records.push_back(std::move(rec));
  };
  record(0, obs);

  for (Eigen::Index k = 0; k + 1 < n_steps; ++k) {
    const Eigen::VectorXd des_pos = slice(lam, k, 0, D);
    const Eigen::VectorXd des_vel = (slice(lam, k + 1, 0, D) - des_pos) / dt;
    try {
      obs = env.apply(des_pos, des_vel);
    } catch (const EnvironmentFault& fault) {
      log.complete = false;
      log.fault = fault.what();
      return log;
    }
    const Eigen::Index now = k + 1;
    record(now, obs);

    if (!options.enable_replanning) continue;
    const double t_now = grid.time(static_cast<std::size_t>(now));
    const Eigen::VectorXd expected = slice(lam, now, D, F);
    if (!replan_trigger(expected, obs.measured_force, options.replan.delta).triggered) {
      continue;
    }
    if (replanner.in_cooldown(t_now) || now + 1 >= n_steps) continue;

    // The generator restarts from the commanded state, which is what the
    // impedance controller is tracking.
    mp::InitialState init_now{
        lam.values().row(now).transpose(),
        ((lam.values().row(now) - lam.values().row(now - 1)) / dt).transpose()};
    ReplanResult result = replanner.replan(lam, init_now, t_now,
                                           ForceMeasurement{t_now, obs.measured_force},
                                           expected);
    const mp::BasisSystem restarted =
        basis.kind() == mp::BasisKind::kProDmp
            ? mp::rebase(basis, static_cast<std::size_t>(now))
            : basis;
    force_std = mp::marginal_variances(result.wd, restarted).rightCols(F).cwiseSqrt();
    lam = std::move(result.lam_des);
    log.records.back().replanned = true;
    log.events.push_back(std::move(result.event));
  }
  return log;
}

}  // namespace famp::force
