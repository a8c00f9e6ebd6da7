#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "famp/error.hpp"
#include "famp/force/conditioning.hpp"
#include "famp/force/monitor.hpp"
#include "famp/force/replanning.hpp"
#include "famp/mp/basis.hpp"
#include "famp/mp/distribution.hpp"
#include "famp/mp/fitting.hpp"

namespace famp::force {
namespace {

using mp::BasisKind;
using mp::BasisSystem;
using mp::InitialState;
using mp::TimeGrid;
using mp::Trajectory;
using mp::WeightDistribution;

BasisSystem make_basis(std::size_t n_steps = 101, std::size_t n_basis = 8) {
  mp::DmpConfig cfg;
  cfg.n_basis = n_basis;
  return mp::build_basis(cfg, TimeGrid(1.0, n_steps), BasisKind::kProDmp);
}

Eigen::MatrixXd random_spd(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
  return a * a.transpose() + 1e-3 * Eigen::MatrixXd::Identity(n, n);
}

Eigen::VectorXd random_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

// Demos where a deeper push comes with a larger contact force.
WeightDistribution fitted_pos_force_model(const BasisSystem& basis) {
  const TimeGrid& grid = basis.grid();
  const auto n = static_cast<Eigen::Index>(grid.size());
  std::vector<mp::WeightVector> weights;
  for (int i = 0; i < 7; ++i) {
    const double depth = 0.5 + 0.1 * i;
    Eigen::MatrixXd v(n, 2);
    for (Eigen::Index t = 0; t < n; ++t) {
      const double s = grid.time(static_cast<std::size_t>(t));
      const double ramp = s * s * (3.0 - 2.0 * s);
      v(t, 0) = depth * ramp;
      v(t, 1) = -20.0 * depth * ramp * std::exp(-8.0 * (s - 0.6) * (s - 0.6));
    }
    const Trajectory traj(grid, v);
    weights.push_back(mp::fit_weights(traj, basis, InitialState::from_trajectory(traj)));
  }
  return mp::fit_weight_distribution(weights, 2, 1e-8, 1e-6);
}

TEST(Conditioning, PriorMeanValueLeavesMeanUnchanged) {
  const BasisSystem basis = make_basis();
  const WeightDistribution wd(random_vector(18, 1), random_spd(18, 2), 2);
  const InitialState init{random_vector(2, 3), random_vector(2, 4)};
  const Trajectory mean = mp::compose_mean(basis, wd.mean(), init);

  ConditioningSpec spec;
  spec.t_cond = 0.5;
  spec.dims = {1};
  spec.values = Eigen::VectorXd::Constant(1, mean.values()(50, 1));
  spec.obs_noise = Eigen::VectorXd::Zero(1);
  const WeightDistribution post = condition(wd, basis, init, spec);
  EXPECT_LT((post.mean() - wd.mean()).cwiseAbs().maxCoeff(), 1e-9);

  const Eigen::MatrixXd h = observation_matrix(basis, 2, 50, {1});
  EXPECT_LT((h * post.cov() * h.transpose())(0, 0), 1e-9);
  EXPECT_LE(post.cov().trace(), wd.cov().trace());
}

TEST(Conditioning, MatchesTrajectorySpaceGaussianConditioning) {
  const BasisSystem basis = make_basis(41, 6);
  const Eigen::Index n = 41;
  const WeightDistribution wd(random_vector(21, 5), random_spd(21, 6), 3, 0.0);
  const InitialState init{random_vector(3, 7), random_vector(3, 8)};
  const mp::TrajectoryDistribution prior = mp::trajectory_distribution(wd, basis, init);

  ConditioningSpec spec;
  spec.t_cond = 0.3;
  spec.dims = {2, 0};
  spec.values = (Eigen::VectorXd(2) << 1.5, -0.4).finished();
  spec.obs_noise = (Eigen::VectorXd(2) << 1e-2, 5e-3).finished();
  const WeightDistribution post = condition(wd, basis, init, spec);
  const mp::TrajectoryDistribution got = mp::trajectory_distribution(post, basis, init);

  // Reduced Gaussian: pick the observed entries of the trajectory vector.
  const std::size_t step = basis.grid().nearest_index(spec.t_cond);
  std::vector<Eigen::Index> idx;
  for (auto d : spec.dims) idx.push_back(d * n + static_cast<Eigen::Index>(step));
  const auto m = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd s_cc(m, m), s_xc(prior.cov().rows(), m);
  Eigen::VectorXd mu_c(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    mu_c[i] = prior.mean()[idx[i]];
    s_xc.col(i) = prior.cov().col(idx[i]);
    for (Eigen::Index j = 0; j < m; ++j) s_cc(i, j) = prior.cov()(idx[i], idx[j]);
  }
  s_cc += Eigen::MatrixXd(spec.obs_noise.asDiagonal());
  const Eigen::MatrixXd k = s_xc * s_cc.inverse();
  const Eigen::VectorXd mean = prior.mean() + k * (spec.values - mu_c);
  const Eigen::MatrixXd cov = prior.cov() - k * s_xc.transpose();

  EXPECT_LT((got.mean() - mean).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((got.cov() - cov).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Conditioning, ForceTargetPassesThroughAndMovesPosition) {
  const BasisSystem basis = make_basis();
  const WeightDistribution wd = fitted_pos_force_model(basis);
  const InitialState init = InitialState::zeros(2);
  ConditioningSpec spec;
  spec.t_cond = 0.6;
  spec.dims = {1};
  spec.values = Eigen::VectorXd::Constant(1, -20.0);
  spec.obs_noise = Eigen::VectorXd::Constant(1, 1e-4);
  const WeightDistribution post = condition(wd, basis, init, spec);

  const Trajectory before = mp::compose_mean(basis, wd.mean(), init);
  const Trajectory after = mp::compose_mean(basis, post.mean(), init);
  EXPECT_NEAR(after.values()(60, 1), -20.0, std::sqrt(1e-4));
  // Deeper pushes carry larger forces, so the position mean moves deeper.
  EXPECT_GT(after.values()(100, 0) - before.values()(100, 0), 1e-3);
}

TEST(Conditioning, UncorrelatedBlocksKeepPositionMarginals) {
  const BasisSystem basis = make_basis(51, 6);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(14, 14);
  cov.topLeftCorner(7, 7) = random_spd(7, 10);
  cov.bottomRightCorner(7, 7) = random_spd(7, 11);
  const WeightDistribution wd(random_vector(14, 12), cov, 2);
  const InitialState init{random_vector(2, 13), Eigen::VectorXd::Zero(2)};
  ConditioningSpec spec;
  spec.t_cond = 0.4;
  spec.dims = {1};
  spec.values = Eigen::VectorXd::Constant(1, 3.0);
  spec.obs_noise = Eigen::VectorXd::Constant(1, 1e-3);
  const WeightDistribution post = condition(wd, basis, init, spec);
  const auto a = mp::trajectory_distribution(wd, basis, init);
  const auto b = mp::trajectory_distribution(post, basis, init);
  EXPECT_LT((a.mean().head(51) - b.mean().head(51)).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((a.cov().topLeftCorner(51, 51) - b.cov().topLeftCorner(51, 51)).cwiseAbs().maxCoeff(),
            1e-9);
}

TEST(Conditioning, SingularInnovationNeedsNoise) {
  const BasisSystem basis = make_basis(21, 4);
  const WeightDistribution wd(Eigen::VectorXd::Zero(5), Eigen::MatrixXd::Zero(5, 5), 1);
  ConditioningSpec spec;
  spec.t_cond = 0.5;
  spec.dims = {0};
  spec.values = Eigen::VectorXd::Constant(1, 1.0);
  spec.obs_noise = Eigen::VectorXd::Zero(1);
  EXPECT_THROW(condition(wd, basis, InitialState::zeros(1), spec), NumericError);
  spec.dims = {3};
  EXPECT_THROW(condition(wd, basis, InitialState::zeros(1), spec), ConfigError);
}

TEST(JointDemos, ConcatenatesPositionsThenForces) {
  const TimeGrid grid(1.0, 2);
  const Trajectory pos(grid, (Eigen::MatrixXd(2, 1) << 0.0, 1.0).finished());
  const Trajectory frc(grid, (Eigen::MatrixXd(2, 1) << 5.0, 5.0).finished());
  const auto joint = assemble_joint_demos({pos}, {frc});
  ASSERT_EQ(joint.size(), 1u);
  EXPECT_EQ(joint[0].values(), (Eigen::MatrixXd(2, 2) << 0, 5, 1, 5).finished());
  EXPECT_THROW(assemble_joint_demos({}, {}), InsufficientDataError);
  const Trajectory other(TimeGrid(2.0, 2), Eigen::MatrixXd::Zero(2, 1));
  EXPECT_THROW(assemble_joint_demos({pos}, {other}), ShapeError);
}

TEST(Trigger, HandExample) {
  const Eigen::Vector3d expected(10.0, 0.0, 5.0);
  const Eigen::Vector3d measured(12.0, 0.5, 1.0);
  const TriggerResult r = replan_trigger(expected, measured, 5.0);
  EXPECT_TRUE(r.triggered);
  EXPECT_EQ(r.deviations, Eigen::Vector3d(2.0, 0.5, 4.0));
  EXPECT_DOUBLE_EQ(r.deviations.sum(), 6.5);
  EXPECT_FALSE(replan_trigger(expected, expected, 1e-9).triggered);
  // Strict inequality at the boundary.
  EXPECT_FALSE(replan_trigger(expected, measured, 6.5).triggered);
}

TEST(SelectDims, HandExamples) {
  EXPECT_EQ(select_dims(Eigen::Vector3d(2.0, 0.5, 4.0), 0.5), std::vector<Eigen::Index>{2});
  EXPECT_EQ(select_dims(Eigen::Vector2d(3.0, 3.0), 0.5), std::vector<Eigen::Index>{0});
  EXPECT_EQ(select_dims(Eigen::Vector4d(1, 1, 1, 1), 1.0), (std::vector<Eigen::Index>{0, 1, 2, 3}));
  EXPECT_THROW(select_dims(Eigen::Vector2d(0.0, 0.0), 0.5), PreconditionError);
}

TEST(Blend, SigmoidValuesAndPartition) {
  const TimeGrid grid(2.0, 201);
  const Trajectory zero(grid, Eigen::MatrixXd::Zero(201, 1));
  const Trajectory one(grid, Eigen::MatrixXd::Ones(201, 1));
  const double t_mix = grid.time(50) - std::log(3.0);
  const Trajectory out = blend(zero, one, t_mix, 1.0);
  EXPECT_NEAR(out.values()(50, 0), 0.75, 1e-15);

  const Trajectory mid = blend(zero, one, grid.time(100), 7.0);
  EXPECT_DOUBLE_EQ(mid.values()(100, 0), 0.5);

  const Trajectory same = blend(one, one, 1.0, 20.0);
  EXPECT_LT((same.values().array() - 1.0).abs().maxCoeff(), 1e-15);

  for (double u = -50.0; u <= 50.0; u += 0.01) {
    EXPECT_NEAR(sigmoid(u) + sigmoid(-u), 1.0, 1e-12);
  }
  EXPECT_THROW(blend(zero, Trajectory(TimeGrid(1.0, 201), Eigen::MatrixXd::Zero(201, 1)), 0.5, 1.0),
               ShapeError);
}

TEST(Replan, SingleForceDimConditionedOnMeasurement) {
  const BasisSystem basis = make_basis();
  const WeightDistribution wd = fitted_pos_force_model(basis);
  const JointSpaceConfig layout{1, 1, {}};
  const InitialState init = InitialState::zeros(2);
  const Trajectory lam = mp::compose_mean(basis, wd.mean(), init);

  ReplanConfig cfg;
  cfg.delta = 1.0;
  const double t_now = 0.4;
  const Eigen::VectorXd expected = lam.values().row(40).tail(1).transpose();
  const Eigen::VectorXd measured = expected.array() - 2.0 * cfg.delta;
  const InitialState init_now{lam.values().row(40).transpose(),
                              ((lam.values().row(40) - lam.values().row(39)) / 0.01).transpose()};
  const ReplanResult r = replan(wd, basis, layout, lam, init, init_now, t_now,
                                ForceMeasurement{t_now, measured}, expected, cfg);
  EXPECT_EQ(r.event.selected_dims, std::vector<Eigen::Index>{0});
  const Trajectory post = mp::compose_mean(basis, r.wd.mean(), init);
  EXPECT_NEAR(post.values()(50, 1), measured[0], std::sqrt(cfg.obs_noise));
  EXPECT_DOUBLE_EQ(r.event.t_cond, 0.5);
  EXPECT_DOUBLE_EQ(r.event.t_mix, t_now + cfg.mix_lead);
  // The new plan starts from the commanded state.
  EXPECT_LT((r.lam_des.values().row(40) - lam.values().row(40)).cwiseAbs().maxCoeff(), 1e-6);

  EXPECT_THROW(replan(wd, basis, layout, lam, init, init_now, t_now,
                      ForceMeasurement{t_now, expected}, expected, cfg),
               PreconditionError);
}

TEST(Replan, ClipKeepsObservationInPredictiveBand) {
  const BasisSystem basis = make_basis();
  const WeightDistribution wd = fitted_pos_force_model(basis);
  const JointSpaceConfig layout{1, 1, {}};
  const InitialState init = InitialState::zeros(2);
  const Trajectory lam = mp::compose_mean(basis, wd.mean(), init);
  ReplanConfig cfg;
  cfg.clip_sigma = 2.0;
  const Eigen::VectorXd expected = lam.values().row(40).tail(1).transpose();
  const Eigen::VectorXd measured = Eigen::VectorXd::Constant(1, -1000.0);
  const ReplanResult r = replan(wd, basis, layout, lam, init, init, 0.4,
                                ForceMeasurement{0.4, measured}, expected, cfg);
  const Eigen::MatrixXd h = observation_matrix(basis, 2, 50, {1});
  const double mean = (h * wd.mean())(0);
  const double sd = std::sqrt((h * wd.cov() * h.transpose())(0, 0));
  EXPECT_NEAR(r.event.conditioned_values[0], mean - 2.0 * sd, 1e-9);
}

TEST(Replanner, RejectsSecondTriggerInsideCooldown) {
  const BasisSystem basis = make_basis();
  const WeightDistribution wd = fitted_pos_force_model(basis);
  const JointSpaceConfig layout{1, 1, {}};
  const InitialState init = InitialState::zeros(2);
  const Trajectory lam = mp::compose_mean(basis, wd.mean(), init);
  ReplanConfig cfg;
  cfg.cooldown = 0.3;
  Replanner planner(wd, basis, init, layout, cfg);
  const Eigen::VectorXd expected = Eigen::VectorXd::Zero(1);
  const Eigen::VectorXd measured = Eigen::VectorXd::Constant(1, -5.0);
  planner.replan(lam, init, 0.2, {0.2, measured}, expected);
  EXPECT_TRUE(planner.in_cooldown(0.4));
  EXPECT_THROW(planner.replan(lam, init, 0.4, {0.4, measured}, expected), PreconditionError);
  EXPECT_FALSE(planner.in_cooldown(0.5));
  EXPECT_NO_THROW(planner.replan(lam, init, 0.5, {0.5, measured}, expected));
}

// Follows the setpoint exactly and reports a fixed force.
class EchoEnv : public EnvironmentHandle {
 public:
  EchoEnv(Eigen::Index d, Eigen::Index f, double dt, Eigen::VectorXd force)
      : d_(d), f_(f), dt_(dt), force_(std::move(force)) {
    obs_.position = Eigen::VectorXd::Zero(d);
    obs_.velocity = Eigen::VectorXd::Zero(d);
    obs_.measured_force = force_;
  }
  Eigen::Index n_pos_dims() const override { return d_; }
  Eigen::Index n_force_dims() const override { return f_; }
  double control_dt() const override { return dt_; }
  Observation observe() const override { return obs_; }
  Observation apply(const Eigen::VectorXd& pos, const Eigen::VectorXd& vel) override {
    obs_.t += dt_;
    obs_.position = pos;
    obs_.velocity = vel;
    return obs_;
  }

 private:
  Eigen::Index d_, f_;
  double dt_;
  Eigen::VectorXd force_;
  Observation obs_;
};

TEST(Monitor, NoTriggerKeepsInitialPlan) {
  const BasisSystem basis = make_basis();
  Eigen::VectorXd mu = random_vector(18, 21);
  mu.tail(9).setZero();
  const WeightDistribution wd(mu, 1e-4 * Eigen::MatrixXd::Identity(18, 18), 2);
  const InitialState init = InitialState::zeros(2);
  EchoEnv env(1, 1, 0.01, Eigen::VectorXd::Constant(1, 0.2));
  MonitorOptions opt;
  opt.replan.delta = 0.5;
  const ExecutionLog log = execute_with_monitor(env, wd, basis, init, {1, 1, {}}, opt);
  EXPECT_TRUE(log.complete);
  EXPECT_TRUE(log.events.empty());
  const Trajectory mean = mp::compose_mean(basis, mu, init);
  ASSERT_EQ(log.records.size(), 101u);
  for (std::size_t k = 0; k < log.records.size(); ++k) {
    EXPECT_EQ(log.records[k].desired_position[0], mean.values()(static_cast<Eigen::Index>(k), 0));
  }
}

TEST(Monitor, ForceOffsetTriggersReplansRespectingCooldown) {
  const BasisSystem basis = make_basis();
  const WeightDistribution wd = fitted_pos_force_model(basis);
  EchoEnv env(1, 1, 0.01, Eigen::VectorXd::Constant(1, -30.0));
  MonitorOptions opt;
  opt.replan.delta = 1.0;
  opt.replan.cooldown = 0.2;
  const ExecutionLog a = execute_with_monitor(env, wd, basis, InitialState::zeros(2), {1, 1, {}}, opt);
  ASSERT_GE(a.events.size(), 2u);
  for (std::size_t i = 1; i < a.events.size(); ++i) {
    EXPECT_GE(a.events[i].t_trigger - a.events[i - 1].t_trigger, 0.2 - 1e-9);
  }
  EchoEnv again(1, 1, 0.01, Eigen::VectorXd::Constant(1, -30.0));
  const ExecutionLog b = execute_with_monitor(again, wd, basis, InitialState::zeros(2), {1, 1, {}}, opt);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    EXPECT_EQ(a.records[k].desired_position, b.records[k].desired_position);
  }
}

}  // namespace
}  // namespace famp::force
