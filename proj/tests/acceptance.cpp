// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "famp/force/conditioning.hpp"
#include "famp/force/replanning.hpp"
#include "famp/harness/commands.hpp"
#include "famp/harness/experiment.hpp"
#include "famp/harness/model.hpp"
#include "famp/mp/basis.hpp"
#include "famp/mp/distribution.hpp"
#include "famp/mp/dmp.hpp"
#include "famp/mp/fitting.hpp"

namespace {

namespace fs = std::filesystem;
using famp::harness::ExperimentConfig;
using famp::harness::ExperimentKind;
using famp::harness::Method;
using famp::harness::ResultsTable;
using famp::mp::BasisKind;
using famp::mp::BasisSystem;
using famp::mp::InitialState;
using famp::mp::TimeGrid;
using famp::mp::Trajectory;
using famp::mp::WeightDistribution;
using nlohmann::json;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::VectorXd gaussian(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

Eigen::MatrixXd random_spd(Eigen::Index n, std::mt19937_64& rng) {
  Eigen::MatrixXd a(n, n);
  std::normal_distribution<double> g;
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
  return a * a.transpose() / static_cast<double>(n) + 1e-3 * Eigen::MatrixXd::Identity(n, n);
}

famp::mp::DmpConfig dmp_with(std::size_t n_basis) {
  famp::mp::DmpConfig cfg;
  cfg.n_basis = n_basis;
  return cfg;
}

Outcome monte_carlo() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  const TimeGrid grid(1.0, 51);
  const BasisSystem basis = famp::mp::build_basis(dmp_with(5), grid, BasisKind::kProDmp);
  const WeightDistribution wd(gaussian(12, rng, 2.0), random_spd(12, rng), 2, 1e-4);
  const InitialState init{gaussian(2, rng), gaussian(2, rng)};
  const auto td = famp::mp::trajectory_distribution(wd, basis, init);

  const std::size_t n = 100000;
  const Eigen::Index dim = td.mean().size();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
  Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(dim, dim);
  std::mt19937_64 noise_rng(99);
  std::normal_distribution<double> noise(0.0, std::sqrt(wd.sigma_n_sq()));
  Eigen::MatrixXd batch(dim, 1000);
  std::size_t filled = 0;
  for (const Trajectory& s : famp::mp::sample_trajectories(wd, basis, init, n, 7)) {
    Eigen::VectorXd v(dim);
    for (Eigen::Index d = 0; d < 2; ++d) v.segment(d * 51, 51) = s.values().col(d);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] += noise(noise_rng);
    batch.col(static_cast<Eigen::Index>(filled++)) = v;
    if (filled == 1000) {
      sum += batch.rowwise().sum();
      outer.noalias() += batch * batch.transpose();
      filled = 0;
    }
  }
  const double nd = static_cast<double>(n);
  const Eigen::VectorXd mean = sum / nd;
  const Eigen::MatrixXd cov = (outer - nd * mean * mean.transpose()) / (nd - 1.0);

  double worst_z = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double se = std::sqrt(td.cov()(i, i) / nd);
    worst_z = std::max(worst_z, std::abs(mean[i] - td.mean()[i]) / se);
  }
  const double rel = (cov - td.cov()).norm() / td.cov().norm();
  const double secs = seconds_since(t0);
  return {worst_z < 4.0 && rel < 0.02 && secs < 60.0,
          "max |z| " + fmt("%.2f", worst_z) + ", cov rel err " + fmt("%.4f", rel) + ", " +
              fmt("%.1f", secs) + " s"};
}

// Weight distributions fitted by the shipped experiments.
std::vector<std::pair<famp::harness::Model, famp::demos::DemoDataset>> experiment_models() {
  std::vector<std::pair<famp::harness::Model, famp::demos::DemoDataset>> models;
  for (auto kind : {ExperimentKind::kReplay, ExperimentKind::kVerticalAdaptation,
                    ExperimentKind::kHorizontalAdaptation, ExperimentKind::kPowerPlug}) {
    const auto setup = famp::harness::preset(kind);
    const auto ds = famp::harness::training_dataset(setup, 1);
    models.emplace_back(famp::harness::fit_model(ds, Method::kFaProDmp, setup.dmp), ds);
  }
  return models;
}

Outcome boundary_condition(
    const std::vector<std::pair<famp::harness::Model, famp::demos::DemoDataset>>& models) {
  std::mt19937_64 rng(5);
  double worst_pos = 0.0;
  double worst_vel_ratio = 0.0;
  std::size_t count = 0;
  for (const auto& [m, ds] : models) {
    const BasisSystem basis = m.basis();
    const double dt = basis.grid().dt();
    const WeightDistribution& wd = *m.weights;
    auto samples = famp::mp::sample_weights(wd, 20, 11);
    samples.push_back(wd.mean());
    std::vector<InitialState> inits;
    for (const auto& r : ds.records) {
      inits.push_back(InitialState::from_trajectory(r.joint_trajectory()));
    }
    for (int i = 0; i < 10; ++i) {
      InitialState s = inits.front();
      s.position.head(m.d_pos) += gaussian(m.d_pos, rng, 0.02);
      s.velocity.head(m.d_pos) += gaussian(m.d_pos, rng, 0.05);
      inits.push_back(s);
    }
    for (const auto& w : samples) {
      for (const auto& init : inits) {
        const Trajectory t = famp::mp::compose_mean(basis, w, init);
        const Eigen::VectorXd y0 = t.values().row(0).transpose();
        const Eigen::VectorXd fd = (t.values().row(1) - t.values().row(0)).transpose() / dt;
        worst_pos = std::max(worst_pos, (y0 - init.position).cwiseAbs().maxCoeff());
        worst_vel_ratio =
            std::max(worst_vel_ratio, (fd - init.velocity).cwiseAbs().maxCoeff() / (10.0 * dt));
        ++count;
      }
    }
  }
  return {worst_pos == 0.0 && worst_vel_ratio <= 1.0,
          std::to_string(count) + " trajectories, start offset " + fmt("%.1e", worst_pos) +
              ", worst |fd - v| at " + fmt("%.2f", worst_vel_ratio) + " of 10 dt"};
}

Outcome round_trip() {
  std::mt19937_64 rng(8);
  const TimeGrid grid(1.0, 201);
  const auto cfg = dmp_with(8);
  const BasisSystem basis = famp::mp::build_basis(cfg, grid, BasisKind::kProDmp);
  double worst_rel = 0.0;
  double worst_rel_exact = 0.0;
  double worst_abs = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd omega = gaussian(27, rng, 10.0);
    const InitialState init{gaussian(3, rng), gaussian(3, rng)};
    const Trajectory t = famp::mp::compose_mean(basis, omega, init);
    const Eigen::VectorXd fit = famp::mp::fit_weights(t, basis, init, 1e-12);
    worst_rel = std::max(worst_rel, (fit - omega).norm() / omega.norm());
    const Eigen::VectorXd exact = famp::mp::fit_weights(t, basis, init, 0.0);
    worst_rel_exact = std::max(worst_rel_exact, (exact - omega).norm() / omega.norm());
    const Trajectory direct = famp::mp::integrate_dmp(cfg, omega, init, grid);
    worst_abs = std::max(worst_abs, (direct.values() - t.values()).cwiseAbs().maxCoeff());
  }
  // The ridge 1e-12 result is the exact penalized minimizer; its bias on the
  // small forcing columns is what limits it.
  return {worst_rel < 1e-6 && worst_rel_exact < 1e-6 && worst_abs < 1e-6,
          "fit rel err " + fmt("%.1e", worst_rel) + " at ridge 1e-12, " +
              fmt("%.1e", worst_rel_exact) + " at ridge 0, integrate vs compose " +
              fmt("%.1e", worst_abs)};
}

Outcome conditioning_suite() {
  std::mt19937_64 rng(13);
  const TimeGrid grid(1.0, 101);
  const BasisSystem basis = famp::mp::build_basis(dmp_with(8), grid, BasisKind::kProDmp);

  // (a) prior-mean observation
  const WeightDistribution wd(gaussian(18, rng), random_spd(18, rng), 2, 0.0);
  const InitialState init{gaussian(2, rng), gaussian(2, rng)};
  const Trajectory mean = famp::mp::compose_mean(basis, wd.mean(), init);
  famp::force::ConditioningSpec spec;
  spec.t_cond = 0.37;
  spec.dims = {1};
  spec.values = Eigen::VectorXd::Constant(1, mean.values()(37, 1));
  spec.obs_noise = Eigen::VectorXd::Constant(1, 1e-4);
  const double shift_a =
      (famp::force::condition(wd, basis, init, spec).mean() - wd.mean()).cwiseAbs().maxCoeff();

  // (b) force target on a fitted position + force model
  std::vector<famp::mp::WeightVector> weights;
  for (int i = 0; i < 7; ++i) {
    const double depth = 0.5 + 0.1 * i;
    Eigen::MatrixXd v(101, 2);
    for (Eigen::Index k = 0; k < 101; ++k) {
      const double s = grid.time(static_cast<std::size_t>(k));
      const double ramp = s * s * (3.0 - 2.0 * s);
      v(k, 0) = depth * ramp;
      v(k, 1) = -20.0 * depth * ramp * std::exp(-8.0 * (s - 0.6) * (s - 0.6));
    }
    const Trajectory t(grid, v);
    weights.push_back(famp::mp::fit_weights(t, basis, InitialState::from_trajectory(t)));
  }
  const WeightDistribution joint = famp::mp::fit_weight_distribution(weights, 2, 1e-8);
  const InitialState zero = InitialState::zeros(2);
  spec.t_cond = 0.6;
  spec.dims = {1};
  spec.values = Eigen::VectorXd::Constant(1, -20.0);
  const WeightDistribution post = famp::force::condition(joint, basis, zero, spec);
  const Trajectory before = famp::mp::compose_mean(basis, joint.mean(), zero);
  const Trajectory after = famp::mp::compose_mean(basis, post.mean(), zero);
  const double force_err = std::abs(after.values()(60, 1) + 20.0);
  const double pos_shift = (after.values().col(0) - before.values().col(0)).cwiseAbs().maxCoeff();

  // (c) masked basis vs reduced Gaussian in trajectory space
  const WeightDistribution wd3(gaussian(27, rng), random_spd(27, rng), 3, 0.0);
  const InitialState init3{gaussian(3, rng), gaussian(3, rng)};
  famp::force::ConditioningSpec s3;
  s3.t_cond = 0.25;
  s3.dims = {2, 0};
  s3.values = gaussian(2, rng);
  s3.obs_noise = Eigen::Vector2d(1e-2, 3e-3);
  const auto prior = famp::mp::trajectory_distribution(wd3, basis, init3);
  const auto got = famp::mp::trajectory_distribution(famp::force::condition(wd3, basis, init3, s3),
                                                     basis, init3);
  const Eigen::Index idx[2] = {2 * 101 + 25, 25};
  Eigen::Matrix2d scc;
  Eigen::MatrixXd sxc(prior.cov().rows(), 2);
  Eigen::Vector2d mc;
  for (int i = 0; i < 2; ++i) {
    mc[i] = prior.mean()[idx[i]];
    sxc.col(i) = prior.cov().col(idx[i]);
    for (int j = 0; j < 2; ++j) scc(i, j) = prior.cov()(idx[i], idx[j]);
  }
  scc += s3.obs_noise.asDiagonal();
  const Eigen::MatrixXd k = sxc * scc.inverse();
  const double diff_c =
      std::max((got.mean() - (prior.mean() + k * (s3.values - mc))).cwiseAbs().maxCoeff(),
               (got.cov() - (prior.cov() - k * sxc.transpose())).cwiseAbs().maxCoeff());

  const bool pass = shift_a < 1e-9 && force_err <= std::sqrt(1e-4) && pos_shift > 1e-6 &&
                    diff_c < 1e-9;
  return {pass, "(a) " + fmt("%.1e", shift_a) + ", (b) force err " + fmt("%.1e", force_err) +
                    " pos shift " + fmt("%.3f", pos_shift) + ", (c) " + fmt("%.1e", diff_c)};
}

Outcome worked_examples() {
  const auto trig = famp::force::replan_trigger(Eigen::Vector3d(10, 0, 5),
                                                Eigen::Vector3d(12, 0.5, 1), 5.0);
  bool ok = trig.triggered && trig.deviations == Eigen::Vector3d(2, 0.5, 4) &&
            trig.deviations.sum() == 6.5;
  ok = ok && !famp::force::replan_trigger(Eigen::Vector3d(10, 0, 5), Eigen::Vector3d(12, 0.5, 1),
                                          6.5)
                  .triggered;
  ok = ok && famp::force::select_dims(Eigen::Vector3d(2, 0.5, 4), 0.5) ==
                 std::vector<Eigen::Index>{2};
  ok = ok && famp::force::select_dims(Eigen::Vector2d(3, 3), 0.5) == std::vector<Eigen::Index>{0};

  const TimeGrid grid(10.0, 10001);
  const Trajectory zero(grid, Eigen::MatrixXd::Zero(10001, 1));
  const Trajectory one(grid, Eigen::MatrixXd::Ones(10001, 1));
  const double t_mix = grid.time(5000);
  const Trajectory ln3 = famp::force::blend(zero, one, t_mix - std::log(3.0), 1.0);
  ok = ok && std::abs(ln3.values()(5000, 0) - 0.75) < 1e-15;

  double worst = 0.0;
  for (double gamma : {0.5, 20.0, 200.0}) {
    const Trajectory a = famp::force::blend(zero, one, t_mix, gamma);
    const Trajectory b = famp::force::blend(one, zero, t_mix, gamma);
    worst = std::max(worst, ((a.values() + b.values()).array() - 1.0).abs().maxCoeff());
  }
  return {ok && worst <= 1e-12, "partition of unity err " + fmt("%.1e", worst)};
}

ExperimentConfig load_config(const std::string& name) {
  const fs::path p = fs::path(FAMP_CONFIG_DIR) / (name + ".json");
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  return famp::harness::experiment_config_from_json(json::parse(in));
}

std::string counts(const ResultsTable& t) {
  std::string s;
  for (const auto& m : t.summaries) {
    s += famp::harness::to_string(m.method) + " " + std::to_string(m.successes) + "/" +
         std::to_string(m.runs) + " ";
  }
  return s;
}

// Baseline runs that failed end further than half the seat depth away.
bool failed_baselines_far(const ResultsTable& t, double* worst_mm) {
  bool ok = true;
  for (Method m : {Method::kCic, Method::kDmp, Method::kProMp, Method::kProDmp}) {
    for (const auto& r : t.rows_for(m)) {
      if (r.inserted) continue;
      *worst_mm = std::min(*worst_mm, r.position_error_mm);
      ok = ok && r.position_error_mm > 0.5 * t.seat_depth_mm;
    }
  }
  return ok;
}

bool fa_adapts(const ResultsTable& t) {
  const auto& s = t.summary(Method::kFaProDmp);
  bool ok = s.successes == s.runs && s.runs == 7;
  for (const auto& r : t.rows_for(Method::kFaProDmp)) ok = ok && r.replans >= 1;
  return ok && s.mean_position_error_mm < 0.1 * t.seat_depth_mm;
}

bool matched_draws_only(const ResultsTable& t) {
  bool ok = true;
  for (Method m : {Method::kCic, Method::kDmp}) {
    for (const auto& r : t.rows_for(m)) ok = ok && r.inserted == r.demo_matches;
  }
  return ok;
}

bool probabilistic_fail(const ResultsTable& t) {
  return t.summary(Method::kProMp).successes == 0 && t.summary(Method::kProDmp).successes == 0;
}

Outcome adaptation(const std::string& name, bool check_matched) {
  const auto t0 = std::chrono::steady_clock::now();
  const ResultsTable t = famp::harness::run_experiment(load_config(name));
  const double secs = seconds_since(t0);
  double closest = 1e9;
  const bool far = failed_baselines_far(t, &closest);
  const bool pass = fa_adapts(t) && probabilistic_fail(t) &&
                    (!check_matched || matched_draws_only(t)) && far && secs < 300.0;
  return {pass, counts(t) + "| FA error " +
                    fmt("%.2f", t.summary(Method::kFaProDmp).mean_position_error_mm) +
                    " mm of seat " + fmt("%.0f", t.seat_depth_mm) + " mm, closest failed baseline " +
                    fmt("%.1f", closest) + " mm, " + fmt("%.0f", secs) + " s"};
}

Outcome power_plug() {
  const ResultsTable t = famp::harness::run_experiment(load_config("power_plug"));
  const auto& fa = t.summary(Method::kFaProDmp);
  bool ok = fa.successes == 7 && fa.runs == 7 && probabilistic_fail(t) && matched_draws_only(t);
  return {ok, counts(t) + "| FA error " + fmt("%.3f", fa.mean_position_error_mm) + " mm"};
}

Outcome replay() {
  const ResultsTable t = famp::harness::run_experiment(load_config("replay"));
  bool ok = true;
  for (const auto& s : t.summaries) ok = ok && s.runs == 7 && s.successes == 7;
  return {ok && t.summaries.size() == 5, counts(t)};
}

std::string read_all(const fs::path& p) {
  std::stringstream s;
  s << std::ifstream(p, std::ios::binary).rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "famp_acceptance_determinism";
  fs::remove_all(root);
  std::vector<std::vector<std::pair<std::string, std::string>>> outputs;
  for (const char* run : {"a", "b"}) {
    famp::harness::CommandOptions opt;
    opt.config = fs::path(FAMP_CONFIG_DIR) / "horizontal_adaptation.json";
    opt.out = root / run;
    std::ostringstream out, err;
    if (famp::harness::cmd_experiment(opt, out, err) != 0) return {false, err.str()};
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& e : fs::recursive_directory_iterator(opt.out)) {
      if (e.is_regular_file()) {
        files.emplace_back(fs::relative(e.path(), opt.out).string(), read_all(e.path()));
      }
    }
    std::sort(files.begin(), files.end());
    outputs.push_back(std::move(files));
  }
  const bool same = outputs[0] == outputs[1];
  return {same && !outputs[0].empty(),
          std::to_string(outputs[0].size()) + " files " + (same ? "identical" : "differ")};
}

}  // namespace

int main() {
  const auto models = experiment_models();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 trajectory distribution Monte-Carlo", monte_carlo},
      {"2 boundary condition", [&] { return boundary_condition(models); }},
      {"3 fit/compose round trip", round_trip},
      {"4 conditioning suite", conditioning_suite},
      {"5 trigger/selection/blend exactness", worked_examples},
      {"6 vertical adaptation ordering", [] { return adaptation("vertical_adaptation", true); }},
      {"7 horizontal adaptation ordering", [] { return adaptation("horizontal_adaptation", true); }},
      {"8 power plug", power_plug},
      {"9 demonstration replay", replay},
      {"10 determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
