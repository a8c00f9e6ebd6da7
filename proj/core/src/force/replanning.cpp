#include "famp/force/replanning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "famp/error.hpp"
#include "famp/mp/fitting.hpp"

namespace famp::force {

void ReplanConfig::validate() const {
  if (!(delta > 0.0)) throw ConfigError("replan delta must be positive");
  if (!(coverage_ratio > 0.0 && coverage_ratio <= 1.0)) {
    throw ConfigError("coverage_ratio must lie in (0, 1]");
  }
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (!(mix_lead > 0.0)) throw ConfigError("mix_lead must be positive");
  if (!(cond_lead >= 0.0)) throw ConfigError("cond_lead must be non-negative");
  if (!(cooldown >= 0.0)) throw ConfigError("cooldown must be non-negative");
  if (!(obs_noise >= 0.0)) throw ConfigError("obs_noise must be non-negative");
  if (!(clip_sigma >= 0.0)) throw ConfigError("clip_sigma must be non-negative");
}

TriggerResult replan_trigger(const Eigen::VectorXd& expected,
                             const Eigen::VectorXd& measured, double delta) {
  if (expected.size() != measured.size()) {
    throw ShapeError("expected and measured force vectors differ in length");
  }
  TriggerResult out;
  out.deviations = (expected - measured).cwiseAbs();
  out.triggered = delta < out.deviations.sum();
  return out;
}

std::vector<Eigen::Index> select_dims(const Eigen::VectorXd& deviations,
                                      double coverage_ratio) {
  if ((deviations.array() < 0.0).any() || !deviations.allFinite()) {
    throw ConfigError("deviations must be finite and non-negative");
  }
  const double total = deviations.sum();
  if (!(total > 0.0)) {
    throw PreconditionError("all deviations are zero; nothing to select");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(deviations.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return deviations[a] > deviations[b];
  });

  std::vector<Eigen::Index> selected;
  double covered = 0.0;
  for (auto idx : order) {
    selected.push_back(idx);
    covered += deviations[idx];
    if (covered >= coverage_ratio * total) break;
  }
  return selected;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

mp::Trajectory blend(const mp::Trajectory& lam_old,
                     const mp::Trajectory& lam_cond, double t_mix,
                     double gamma) {
  if (!(lam_old.grid() == lam_cond.grid())) throw ShapeError("blend grids differ");
  if (lam_old.n_dims() != lam_cond.n_dims()) throw ShapeError("blend dims differ");
  const auto& grid = lam_old.grid();
  Eigen::MatrixXd out(lam_old.n_steps(), lam_old.n_dims());
  for (Eigen::Index t = 0; t < out.rows(); ++t) {
    const double u = gamma * (grid.time(static_cast<std::size_t>(t)) - t_mix);
    out.row(t) = lam_old.values().row(t) * sigmoid(-u) +
                 lam_cond.values().row(t) * sigmoid(u);
  }
  return mp::Trajectory(grid, std::move(out));
}

ReplanResult replan(const mp::WeightDistribution& wd,
                    const mp::BasisSystem& basis, const JointSpaceConfig& layout,
                    const mp::Trajectory& lam_old,
                    const mp::InitialState& init_start,
                    const mp::InitialState& init_now, double t_now,
                    const ForceMeasurement& measurement,
                    const Eigen::VectorXd& expected, const ReplanConfig& cfg) {
  cfg.validate();
  layout.validate();
  if (wd.n_dims() != layout.total() || lam_old.n_dims() != layout.total()) {
    throw ShapeError("replan inputs do not match the joint layout");
  }
  if (measurement.tau.size() != layout.f_force || expected.size() != layout.f_force) {
    throw ShapeError("force vectors must have F entries");
  }

  const TriggerResult trig = replan_trigger(expected, measurement.tau, cfg.delta);
  if (!trig.triggered) {
    throw PreconditionError("replan called although the force deviation is within delta");
  }
  const std::vector<Eigen::Index> force_dims =
      select_dims(trig.deviations, cfg.coverage_ratio);

  const auto& grid = basis.grid();
  const std::size_t now_step = grid.nearest_index(t_now);
  const mp::BasisSystem restarted =
      basis.kind() == mp::BasisKind::kProDmp ? mp::rebase(basis, now_step) : basis;

  ConditioningSpec spec;
  spec.t_cond = std::min(t_now + cfg.cond_lead, grid.duration());
  const auto n_sel = static_cast<Eigen::Index>(force_dims.size());
  spec.values.resize(n_sel);
  spec.obs_noise = Eigen::VectorXd::Constant(n_sel, cfg.obs_noise);
  const std::size_t cond_step = grid.nearest_index(spec.t_cond);
  for (Eigen::Index j = 0; j < n_sel; ++j) {
    const Eigen::Index f = force_dims[static_cast<std::size_t>(j)];
    const Eigen::Index dim = layout.force_index(f);
    spec.dims.push_back(dim);
    double value = measurement.tau[f];
    if (cfg.clip_sigma > 0.0) {
      // Keep the observation inside the prior predictive band at t_cond.
      const Eigen::MatrixXd h = observation_matrix(basis, wd.n_dims(), cond_step, {dim});
      const auto row = static_cast<Eigen::Index>(cond_step);
      const double mean = (h * wd.mean())(0) + basis.xi1()(row) * init_start.position(dim) +
                          basis.xi2()(row) * init_start.velocity(dim);
      const double sd = std::sqrt(std::max((h * wd.cov() * h.transpose())(0, 0), 0.0));
      value = std::clamp(value, mean - cfg.clip_sigma * sd, mean + cfg.clip_sigma * sd);
    }
    spec.values[j] = value;
  }

  mp::WeightDistribution posterior = condition(wd, basis, init_start, spec);
  const mp::Trajectory lam_cond = mp::compose_mean(restarted, posterior.mean(), init_now);
  const double t_mix = t_now + cfg.mix_lead;

  ReplanEvent event;
  event.t_trigger = t_now;
  event.deviations = trig.deviations;
  event.selected_dims = force_dims;
  event.conditioned_values = spec.values;
  event.t_cond = grid.time(grid.nearest_index(spec.t_cond));
  event.t_mix = t_mix;

  return ReplanResult{std::move(posterior), blend(lam_old, lam_cond, t_mix, cfg.gamma),
                      std::move(event)};
}

Replanner::Replanner(mp::WeightDistribution prior, mp::BasisSystem basis,
                     mp::InitialState init_start, JointSpaceConfig layout,
                     ReplanConfig cfg)
    : prior_(prior),
      current_(std::move(prior)),
      basis_(std::move(basis)),
      init_start_(std::move(init_start)),
      layout_(std::move(layout)),
      cfg_(cfg) {
  cfg_.validate();
  layout_.validate();
}

bool Replanner::in_cooldown(double t) const {
  return last_replan_.has_value() && t - *last_replan_ < cfg_.cooldown;
}

ReplanResult Replanner::replan(const mp::Trajectory& lam_old,
                               const mp::InitialState& init_now, double t_now,
                               const ForceMeasurement& measurement,
                               const Eigen::VectorXd& expected) {
  if (in_cooldown(t_now)) {
    throw PreconditionError("replan requested " +
                            std::to_string(t_now - *last_replan_) +
                            " s after the previous one, inside the cooldown");
  }
  ReplanResult result = force::replan(cfg_.accumulate ? current_ : prior_, basis_, layout_, lam_old, init_start_, init_now,
                                      t_now, measurement, expected, cfg_);
  last_replan_ = t_now;
  current_ = result.wd;
  return result;
}

}  // namespace famp::force
