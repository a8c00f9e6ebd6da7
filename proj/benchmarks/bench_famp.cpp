#include <random>

#include <Eigen/Dense>
#include <benchmark/benchmark.h>

#include "famp/force/conditioning.hpp"
#include "famp/harness/experiment.hpp"
#include "famp/harness/methods.hpp"
#include "famp/harness/model.hpp"
#include "famp/mp/basis.hpp"
#include "famp/mp/distribution.hpp"
#include "famp/mp/fitting.hpp"
#include "famp/sim/simulator.hpp"

namespace {

using famp::mp::BasisKind;
using famp::mp::BasisSystem;
using famp::mp::DmpConfig;
using famp::mp::TimeGrid;
using famp::mp::WeightDistribution;

DmpConfig with_basis(std::size_t n) {
  DmpConfig cfg;
  cfg.n_basis = n;
  return cfg;
}

WeightDistribution random_distribution(Eigen::Index block, Eigen::Index n_dims) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  const Eigen::Index n = block * n_dims;
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
  Eigen::VectorXd mu(n);
  for (Eigen::Index i = 0; i < n; ++i) mu[i] = g(rng);
  return WeightDistribution(mu, a * a.transpose() / static_cast<double>(n) +
                                    1e-3 * Eigen::MatrixXd::Identity(n, n),
                            n_dims, 1e-4);
}

void BM_BuildBasis(benchmark::State& state) {
  const DmpConfig cfg = with_basis(static_cast<std::size_t>(state.range(0)));
  const TimeGrid grid(1.0, 501);
  for (auto _ : state) {
    benchmark::DoNotOptimize(famp::mp::build_basis(cfg, grid, BasisKind::kProDmp));
  }
}
BENCHMARK(BM_BuildBasis)->Arg(10)->Arg(25);

void BM_FitWeights(benchmark::State& state) {
  const TimeGrid grid(1.0, 501);
  const BasisSystem basis = famp::mp::build_basis(with_basis(25), grid, BasisKind::kProDmp);
  const auto init = famp::mp::InitialState::zeros(4);
  const auto traj = famp::mp::compose_mean(basis, Eigen::VectorXd::LinSpaced(104, -1.0, 1.0), init);
  for (auto _ : state) benchmark::DoNotOptimize(famp::mp::fit_weights(traj, basis, init));
}
BENCHMARK(BM_FitWeights);

void BM_TrajectoryDistribution(benchmark::State& state) {
  const TimeGrid grid(1.0, static_cast<std::size_t>(state.range(0)));
  const BasisSystem basis = famp::mp::build_basis(with_basis(10), grid, BasisKind::kProDmp);
  const WeightDistribution wd = random_distribution(11, 4);
  const auto init = famp::mp::InitialState::zeros(4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(famp::mp::trajectory_distribution(wd, basis, init));
  }
}
BENCHMARK(BM_TrajectoryDistribution)->Arg(101)->Arg(301);

void BM_Condition(benchmark::State& state) {
  const TimeGrid grid(6.0, 3001);
  const BasisSystem basis = famp::mp::build_basis(with_basis(25), grid, BasisKind::kProDmp);
  const WeightDistribution wd = random_distribution(26, 4);
  famp::force::ConditioningSpec spec;
  spec.t_cond = 3.0;
  spec.dims = {2, 3};
  spec.values = Eigen::Vector2d(-5.0, 1.0);
  spec.obs_noise = Eigen::Vector2d::Constant(1e-2);
  const auto init = famp::mp::InitialState::zeros(4);
  for (auto _ : state) benchmark::DoNotOptimize(famp::force::condition(wd, basis, init, spec));
}
BENCHMARK(BM_Condition);

void BM_SimulatorStep(benchmark::State& state) {
  famp::sim::EnvConfig cfg;
  famp::sim::Simulator sim(cfg);
  const Eigen::VectorXd target = cfg.origin() + 0.005 * cfg.axis();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(cfg.n_pos_dims);
  for (auto _ : state) benchmark::DoNotOptimize(sim.step(target, zero));
}
BENCHMARK(BM_SimulatorStep);

void BM_FaProDmpEpisode(benchmark::State& state) {
  const auto setup = famp::harness::preset(famp::harness::ExperimentKind::kVerticalAdaptation);
  const auto ds = famp::harness::training_dataset(setup, 1);
  const auto model =
      famp::harness::fit_model(ds, famp::harness::Method::kFaProDmp, setup.dmp);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        famp::harness::execute_method(model, setup.test_env, 1, setup.replan));
  }
}
BENCHMARK(BM_FaProDmpEpisode)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
