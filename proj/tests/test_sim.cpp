#include <cmath>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "famp/error.hpp"
#include "famp/sim/contact.hpp"
#include "famp/sim/env_config.hpp"
#include "famp/sim/metrics.hpp"
#include "famp/sim/simulator.hpp"

namespace famp::sim {
namespace {

EnvConfig quiet_env() {
  EnvConfig cfg;
  cfg.sensor_noise_std = 0.0;
  return cfg;
}

TEST(EnvConfig, ValidatesAndRoundTripsJson) {
  EnvConfig cfg;
  cfg.k_plug = 812.5;
  cfg.orientation = Orientation::kHorizontal;
  cfg.detents = {{0.01, 1.0}, {0.02, 1.5}};
  const EnvConfig back = env_config_from_json(to_json(cfg));
  EXPECT_EQ(back.k_plug, 812.5);
  EXPECT_EQ(back.detents, cfg.detents);
  EXPECT_EQ(env_hash(back), env_hash(cfg));
  cfg.k_plug = 813.0;
  EXPECT_NE(env_hash(back), env_hash(cfg));

  EnvConfig bad;
  bad.detents = {{0.02, 1.0}, {0.01, 1.0}};
  EXPECT_THROW(bad.validate(), ConfigError);
  EXPECT_THROW(env_config_from_json({{"orientation", "diagonal"}}), ConfigError);
}

TEST(EnvConfig, PeaksAndSeat) {
  EnvConfig cfg;
  cfg.detents = {{0.008, 1.0}, {0.016, 2.0}};
  cfg.k_plug = 500.0;
  EXPECT_DOUBLE_EQ(cfg.peak(0), 500.0 * 0.008);
  EXPECT_DOUBLE_EQ(cfg.peak(1), 500.0 * 2.0 * 0.008);
  EXPECT_DOUBLE_EQ(cfg.max_peak(), cfg.peak(1));
  EXPECT_DOUBLE_EQ(cfg.seat_depth(), 0.016);
  cfg.required_clicks = 1;
  EXPECT_DOUBLE_EQ(cfg.seat_depth(), 0.008);
  EXPECT_NEAR(depth_of(cfg.seat_point(), cfg), 0.008, 1e-15);
}

TEST(Contact, DetentProfile) {
  const EnvConfig cfg = quiet_env();
  const double peak = cfg.k_plug * cfg.detents[0].peak_scale * cfg.detents[0].depth;
  const double eps = 1e-9;
  EXPECT_EQ(detent_force(0.0, cfg), 0.0);
  EXPECT_EQ(detent_force(-0.01, cfg), 0.0);
  EXPECT_NEAR(detent_force(cfg.detents[0].depth - eps, cfg), peak, 1e-5);
  EXPECT_NEAR(detent_force(cfg.detents[0].depth + eps, cfg), cfg.residual_ratio * peak, 1e-5);
  // Backing out after a click meets the retention spring.
  EXPECT_LT(contact_resistance(cfg.detents[0].depth - 0.004, 1, cfg), 0.0);
  EXPECT_GE(contact_resistance(-1.0, 1, cfg), -peak);
}

TEST(Physics, EquilibriumWithoutContact) {
  const EnvConfig cfg = quiet_env();
  Simulator sim(cfg);
  const Eigen::VectorXd start = sim.state().position;
  const Eigen::VectorXd meas = sim.step(start, Eigen::VectorXd::Zero(cfg.n_pos_dims));
  EXPECT_EQ(sim.state().position, start);
  EXPECT_EQ(sim.state().velocity.norm(), 0.0);
  EXPECT_DOUBLE_EQ(sim.state().t, cfg.dt);
  EXPECT_EQ(meas.norm(), 0.0);

  EnvConfig noisy = cfg;
  noisy.sensor_noise_std = 0.05;
  Simulator sim2(noisy);
  const Eigen::VectorXd m2 = sim2.step(start, Eigen::VectorXd::Zero(cfg.n_pos_dims));
  EXPECT_GT(m2.norm(), 0.0);
  EXPECT_EQ(sim2.state().position, start);
}

TEST(Physics, StaticBalanceMatchesRamp) {
  EnvConfig cfg = quiet_env();
  cfg.kp = 5000.0;
  Simulator sim(cfg);
  const Eigen::VectorXd target = cfg.origin() + 0.006 * cfg.axis();
  for (int i = 0; i < 3000; ++i) sim.step(target, Eigen::VectorXd::Zero(cfg.n_pos_dims));
  const double depth = depth_of(sim.state().position, cfg);
  ASSERT_GT(depth, 0.0);
  ASSERT_LT(depth, cfg.detents[0].depth);
  EXPECT_EQ(sim.state().passed_detents, 0u);
  const double axial = sim.observe().measured_force.dot(cfg.axis());
  EXPECT_NEAR(axial, -cfg.k_plug * depth, 1e-9);
  // Controller and contact balance at rest.
  EXPECT_NEAR(cfg.kp * (0.006 - depth), cfg.k_plug * depth, 1e-6);
}

TEST(Physics, DetentCrossingDropsForce) {
  EnvConfig cfg = quiet_env();
  cfg.kp = 2000.0;
  Simulator sim(cfg);
  const double peak = cfg.peak(0);
  double prev_axial = 0.0;
  double prev_depth = 0.0;
  bool crossed = false;
  for (int i = 0; i < 20000 && !crossed; ++i) {
    const double t = i * cfg.dt;
    const Eigen::VectorXd des = cfg.origin() + (-0.03 + 0.02 * t) * cfg.axis();
    sim.step(des, 0.02 * cfg.axis());
    const double axial = sim.last_contact_force().dot(cfg.axis());
    const double depth = depth_of(sim.state().position, cfg);
    if (sim.state().passed_detents == 1) {
      crossed = true;
      const double ramp_slope = cfg.k_plug * cfg.detents[0].peak_scale;
      const double tol = ramp_slope * std::abs(depth - prev_depth) + 1e-9;
      EXPECT_NEAR(axial - prev_axial, (1.0 - cfg.residual_ratio) * peak, tol);
    }
    prev_axial = axial;
    prev_depth = depth;
  }
  EXPECT_TRUE(crossed);
}

TEST(Physics, NonFiniteStateFaults) {
  EnvConfig cfg = quiet_env();
  Simulator sim(cfg);
  Eigen::VectorXd des = Eigen::VectorXd::Constant(cfg.n_pos_dims, 1e308);
  EXPECT_THROW(
      {
        for (int i = 0; i < 10; ++i) sim.step(des, des);
      },
      EnvironmentFault);
}

class HoldProvider : public DesiredProvider {
 public:
  HoldProvider(Eigen::VectorXd pos, std::size_t n) : pos_(std::move(pos)), n_(n) {}
  std::size_t size() const override { return n_; }
  Eigen::VectorXd position(std::size_t) const override { return pos_; }

 private:
  Eigen::VectorXd pos_;
  std::size_t n_;
};

TEST(Episode, NullPolicyDoesNotInsert) {
  const EnvConfig cfg = quiet_env();
  const EpisodeLog log = run_episode(cfg, HoldProvider(cfg.start_position(), 101));
  EXPECT_TRUE(log.complete);
  EXPECT_EQ(log.records.size(), 101u);
  const Metrics m = metrics(log, cfg, 0);
  EXPECT_FALSE(m.inserted);
  EXPECT_NEAR(m.final_position_error, cfg.seat_depth() - cfg.start_depth, 1e-12);
}

TEST(Episode, DeterministicForSameSeed) {
  EnvConfig cfg;
  cfg.seed = 77;
  const HoldProvider p(cfg.origin() + 0.03 * cfg.axis(), 201);
  const EpisodeLog a = run_episode(cfg, p);
  const EpisodeLog b = run_episode(cfg, p);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].position, b.records[i].position);
    EXPECT_EQ(a.records[i].measured_force, b.records[i].measured_force);
  }
}

TEST(Metrics, SeatAndStall) {
  const EnvConfig cfg = quiet_env();
  const Metrics seated = evaluate(cfg.seat_point(), 3, 1.0, true, cfg, 3);
  EXPECT_EQ(seated.final_position_error, 0.0);
  EXPECT_TRUE(seated.inserted);
  const Metrics stalled = evaluate(cfg.origin(), 0, 1.0, true, cfg, 0);
  EXPECT_FALSE(stalled.inserted);
  EXPECT_NEAR(stalled.final_position_error, cfg.seat_depth(), 1e-15);
  EXPECT_TRUE(evaluate(cfg.origin(), 0, 0.0, false, cfg, 0).incomplete);
}

}  // namespace
}  // namespace famp::sim
