#include "famp/demos/script.hpp"

#include <cmath>
#include <random>
#include <string>

#include "famp/error.hpp"
#include "famp/sim/metrics.hpp"
#include "famp/sim/simulator.hpp"

namespace famp::demos {

void DemoScript::validate() const {
  if (!(0.0 < t_approach && t_approach < t_push && t_push <= t_release &&
        t_release < t_settle && t_settle <= duration)) {
    throw ConfigError("demo script phases must satisfy 0 < approach < push <= release < settle <= duration");
  }
  if (!(push_factor > 1.0)) throw ConfigError("push_factor must exceed 1");
  if (!(approach_speed >= 0.0)) throw ConfigError("approach_speed must be non-negative");
}

double DemoScript::approach_end(double start_depth, double mouth_depth) const {
  if (approach_speed <= 0.0) return t_approach;
  const double t = std::abs(mouth_depth - start_depth) / approach_speed;
  if (!(t > 0.0 && t + (t_settle - t_approach) <= duration)) {
    throw ConfigError("approach at " + std::to_string(approach_speed) +
                      " m/s leaves no time to finish the script");
  }
  return t;
}

mp::Trajectory DemoRecord::joint_trajectory() const {
  Eigen::MatrixXd joint(positions.rows(), positions.cols() + forces.cols());
  joint << positions, forces;
  return {grid, std::move(joint)};
}

void DemoDataset::validate() const {
  if (records.empty()) return;
  const auto d = records.front().positions.cols();
  const auto f = records.front().forces.cols();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const auto n = static_cast<Eigen::Index>(r.grid.size());
    if (r.positions.cols() != d || r.forces.cols() != f) {
      throw ShapeError("record " + std::to_string(i) + " has different D/F");
    }
    if (r.positions.rows() != n || r.forces.rows() != n) {
      throw ShapeError("record " + std::to_string(i) + " rows do not match its grid");
    }
    if (!r.positions.allFinite() || !r.forces.allFinite()) {
      throw NumericError("record " + std::to_string(i) + " is not finite");
    }
  }
}

namespace {

// Minimum-jerk interpolation between a and b over [t0, t1].
double min_jerk(double a, double b, double t0, double t1, double t) {
  if (t <= t0) return a;
  if (t >= t1) return b;
  const double s = (t - t0) / (t1 - t0);
  return a + (b - a) * s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

}  // namespace

mp::Trajectory scripted_setpoints(const sim::EnvConfig& cfg, const DemoScript& script,
                                  double mouth_offset, double push_scale) {
  cfg.validate();
  script.validate();
  const mp::TimeGrid grid = mp::TimeGrid::from_dt(script.duration, cfg.control_dt);
  const double seat = cfg.seat_depth();
  const double push_depth = seat + push_scale * script.push_factor * cfg.max_peak() / cfg.kp;
  const double hold_depth =
      seat + cfg.residual_ratio * cfg.peak(cfg.clicks_required() - 1) / cfg.kp;

  // Later phases keep their durations and move with the end of the approach.
  const double t_mouth = script.approach_end(cfg.start_depth, mouth_offset);
  const double shift = t_mouth - script.t_approach;
  const double t_push = script.t_push + shift;
  const double t_release = script.t_release + shift;
  const double t_settle = script.t_settle + shift;
  const Eigen::VectorXd origin = cfg.origin();
  const Eigen::VectorXd axis = cfg.axis();
  Eigen::MatrixXd values(static_cast<Eigen::Index>(grid.size()), cfg.n_pos_dims);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid.time(k);
    double s;
    if (t <= t_mouth) {
      s = min_jerk(cfg.start_depth, mouth_offset, 0.0, t_mouth, t);
    } else if (t <= t_release) {
      s = min_jerk(mouth_offset, push_depth, t_mouth, t_push, t);
    } else {
      s = min_jerk(push_depth, hold_depth, t_release, t_settle, t);
    }
    values.row(static_cast<Eigen::Index>(k)) = (origin + s * axis).transpose();
  }
  return {grid, std::move(values)};
}

DemoDataset generate_demos(const sim::EnvConfig& cfg, const DemoScript& script,
                           std::size_t n, const DemoJitter& jitter,
                           std::uint64_t seed, const std::string& task) {
  if (n < 1) throw ConfigError("need at least one demonstration");
  cfg.validate();
  script.validate();
  DemoDataset ds;
  ds.task = task;
  const std::string hash = sim::env_hash(cfg);
  for (std::size_t i = 0; i < n; ++i) {
    std::mt19937_64 rng(seed + i);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double mouth = jitter.position_std * normal(rng);
    const double scale = 1.0 + jitter.slope_rel * normal(rng);

    mp::Trajectory setpoints = scripted_setpoints(cfg, script, mouth, scale);
    const sim::EpisodeLog log =
        sim::run_episode(cfg, sim::TrajectoryProvider(setpoints, cfg.n_pos_dims));
    const sim::Metrics m = sim::metrics(log, cfg, cfg.clicks_required());
    if (!log.complete || !m.inserted) {
      throw GenerationError("demonstration " + std::to_string(i) + " did not insert (" +
                            std::to_string(m.clicks) + " of " +
                            std::to_string(cfg.clicks_required()) + " clicks)");
    }

    Eigen::MatrixXd forces(setpoints.n_steps(), cfg.n_pos_dims);
    for (std::size_t k = 0; k < log.records.size(); ++k) {
      forces.row(static_cast<Eigen::Index>(k)) = log.records[k].measured_force.transpose();
    }
    DemoMeta meta{hash, cfg.k_plug, cfg.origin(), seed + i, to_json(script)};
    meta.script["mouth_offset"] = mouth;
    meta.script["push_scale"] = scale;
    ds.records.push_back({setpoints.grid(), setpoints.values(), std::move(forces),
                          std::move(meta)});
  }
  return ds;
}

nlohmann::json to_json(const DemoScript& s) {
  return {{"duration", s.duration},   {"t_approach", s.t_approach},
          {"t_push", s.t_push},       {"t_release", s.t_release},
          {"t_settle", s.t_settle},   {"push_factor", s.push_factor},
          {"approach_speed", s.approach_speed}};
}

DemoScript script_from_json(const nlohmann::json& j) {
  DemoScript s;
  try {
    s.duration = j.value("duration", s.duration);
    s.t_approach = j.value("t_approach", s.t_approach);
    s.t_push = j.value("t_push", s.t_push);
    s.t_release = j.value("t_release", s.t_release);
    s.t_settle = j.value("t_settle", s.t_settle);
    s.push_factor = j.value("push_factor", s.push_factor);
    s.approach_speed = j.value("approach_speed", s.approach_speed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid demo script: ") + e.what());
  }
  s.validate();
  return s;
}

}  // namespace famp::demos
