#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "famp/force/conditioning.hpp"
#include "famp/mp/basis.hpp"
#include "famp/mp/distribution.hpp"
#include "famp/mp/time_grid.hpp"

namespace famp::force {

struct ForceMeasurement {
  double t = 0.0;
  Eigen::VectorXd tau;
};

struct ReplanConfig {
  /// Trigger threshold on the summed absolute force deviation.
  double delta = 1.0;
  /// Fraction of the total deviation the selected dims must cover.
  double coverage_ratio = 0.5;
  /// Sigmoid steepness of the blend, 1/s.
  double gamma = 20.0;
  /// t_mix = t_now + mix_lead.
  double mix_lead = 0.25;
  /// t_cond = t_now + cond_lead.
  double cond_lead = 0.1;
  /// Minimum time between two replans.
  double cooldown = 0.5;
  double obs_noise = 1e-4;
  /// Observed forces are clipped to the prior predictive mean +- clip_sigma
  /// standard deviations at t_cond before conditioning. Zero disables.
  double clip_sigma = 0.0;
  /// Condition the latest posterior instead of the prior on every replan.
  bool accumulate = false;

  void validate() const;
};

struct ReplanEvent {
  double t_trigger = 0.0;
  Eigen::VectorXd deviations;
  /// Force-dimension indices (0-based within the F force dims).
  std::vector<Eigen::Index> selected_dims;
  Eigen::VectorXd conditioned_values;
  double t_cond = 0.0;
  double t_mix = 0.0;
};

struct TriggerResult {
  bool triggered = false;
  Eigen::VectorXd deviations;
};

/// deviations = |expected - measured|; fires when their sum is strictly
/// greater than delta.
TriggerResult replan_trigger(const Eigen::VectorXd& expected,
                             const Eigen::VectorXd& measured, double delta);

/// Shortest prefix of the dims ranked by deviation (descending, ties to the
/// lower index) whose deviation sum reaches coverage_ratio of the total.
std::vector<Eigen::Index> select_dims(const Eigen::VectorXd& deviations,
                                      double coverage_ratio);

double sigmoid(double x);

/// old * sigmoid(-gamma (t - t_mix)) + cond * sigmoid(gamma (t - t_mix)).
mp::Trajectory blend(const mp::Trajectory& lam_old,
                     const mp::Trajectory& lam_cond, double t_mix,
                     double gamma);

struct ReplanResult {
  mp::WeightDistribution wd;
  mp::Trajectory lam_des;
  ReplanEvent event;
};

/// One force-triggered replan: pick the dims to condition, condition `wd`
/// on the measured forces at t_now + cond_lead (through the basis started
/// from `init_start`), regenerate the posterior mean from `init_now` at t_now
/// and blend it into `lam_old`.
/// Throws PreconditionError when the trigger does not fire.
ReplanResult replan(const mp::WeightDistribution& wd,
                    const mp::BasisSystem& basis, const JointSpaceConfig& layout,
                    const mp::Trajectory& lam_old,
                    const mp::InitialState& init_start,
                    const mp::InitialState& init_now, double t_now,
                    const ForceMeasurement& measurement,
                    const Eigen::VectorXd& expected, const ReplanConfig& cfg);

/// Stateful wrapper that enforces the cooldown between successive replans.
/// With `accumulate` each replan conditions the previous posterior;
/// otherwise every replan starts again from the prior.
class Replanner {
 public:
  Replanner(mp::WeightDistribution prior, mp::BasisSystem basis,
            mp::InitialState init_start, JointSpaceConfig layout, ReplanConfig cfg);

  bool in_cooldown(double t) const;
  std::optional<double> last_replan_time() const { return last_replan_; }
  const ReplanConfig& config() const { return cfg_; }

  /// Throws PreconditionError inside the cooldown window.
  ReplanResult replan(const mp::Trajectory& lam_old,
                      const mp::InitialState& init_now, double t_now,
                      const ForceMeasurement& measurement,
                      const Eigen::VectorXd& expected);

 private:
  mp::WeightDistribution prior_;
  mp::WeightDistribution current_;
  mp::BasisSystem basis_;
  mp::InitialState init_start_;
  JointSpaceConfig layout_;
  ReplanConfig cfg_;
  std::optional<double> last_replan_;
};

}  // namespace famp::force
