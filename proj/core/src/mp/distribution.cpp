#include "famp/mp/distribution.hpp"

#include <random>
#include <string>

#include "famp/error.hpp"
#include "famp/mp/linalg.hpp"

namespace famp::mp {

WeightDistribution::WeightDistribution(Eigen::VectorXd mean,
                                       Eigen::MatrixXd cov, Eigen::Index n_dims,
                                       double sigma_n_sq)
    : mean_(std::move(mean)),
      cov_(std::move(cov)),
      n_dims_(n_dims),
      sigma_n_sq_(sigma_n_sq) {
  if (n_dims_ < 1 || mean_.size() == 0 || mean_.size() % n_dims_ != 0) {
    throw ShapeError("weight mean length is not a multiple of n_dims");
  }
  if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size()) {
    throw ShapeError("weight covariance does not match mean length");
  }
  if (!mean_.allFinite()) throw NumericError("weight mean is not finite");
  if (!(sigma_n_sq_ >= 0.0)) throw ConfigError("sigma_n^2 must be non-negative");
  require_symmetric_psd(cov_, "weight covariance");
}

TrajectoryDistribution::TrajectoryDistribution(TimeGrid grid,
                                               Eigen::VectorXd mean,
                                               Eigen::MatrixXd cov,
                                               Eigen::Index n_dims)
    : grid_(grid), mean_(std::move(mean)), cov_(std::move(cov)), n_dims_(n_dims) {
  const auto expected = static_cast<Eigen::Index>(grid_.size()) * n_dims_;
  if (mean_.size() != expected || cov_.rows() != expected ||
      cov_.cols() != expected) {
    throw ShapeError("trajectory distribution size does not match grid x dims");
  }
  if (!mean_.allFinite()) throw NumericError("trajectory mean is not finite");
}

Trajectory TrajectoryDistribution::mean_trajectory() const {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  return Trajectory(grid_, Eigen::Map<const Eigen::MatrixXd>(mean_.data(), n, n_dims_));
}

Eigen::MatrixXd TrajectoryDistribution::marginal_std() const {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  Eigen::VectorXd diag = cov_.diagonal().cwiseMax(0.0).cwiseSqrt();
  return Eigen::Map<const Eigen::MatrixXd>(diag.data(), n, n_dims_);
}

double default_regularizer(const Eigen::MatrixXd& sample_cov) {
  if (sample_cov.rows() == 0) return 0.0;
  return 1e-8 * sample_cov.trace() / static_cast<double>(sample_cov.rows());
}

WeightDistribution fit_weight_distribution(
    const std::vector<WeightVector>& weights, Eigen::Index n_dims,
    double eps_reg, double sigma_n_sq) {
  if (weights.size() < 2) {
    throw InsufficientDataError("need at least 2 weight vectors, got " +
                                std::to_string(weights.size()));
  }
  if (eps_reg < 0.0) throw ConfigError("eps_reg must be non-negative");
  const Eigen::Index dim = weights.front().size();
  Eigen::MatrixXd samples(dim, static_cast<Eigen::Index>(weights.size()));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i].size() != dim) throw ShapeError("weight vectors differ in length");
    samples.col(static_cast<Eigen::Index>(i)) = weights[i];
  }
  const Eigen::VectorXd mean = samples.rowwise().mean();
  const Eigen::MatrixXd centered = samples.colwise() - mean;
  Eigen::MatrixXd cov = centered * centered.transpose() /
                        static_cast<double>(weights.size() - 1);
  cov = symmetrize(cov);
  cov.diagonal().array() += eps_reg;
  return WeightDistribution(mean, std::move(cov), n_dims, sigma_n_sq);
}

namespace {

void check_compatible(const WeightDistribution& wd, const BasisSystem& basis) {
  if (wd.block_size() != basis.block_size()) {
    throw ShapeError("weight distribution block size " +
                     std::to_string(wd.block_size()) + " does not match basis " +
                     std::to_string(basis.block_size()));
  }
}

}  // namespace

TrajectoryDistribution trajectory_distribution(const WeightDistribution& wd,
                                               const BasisSystem& basis,
                                               const InitialState& init) {
  check_compatible(wd, basis);
  const Eigen::Index n_dims = wd.n_dims();
  const Eigen::Index block = wd.block_size();
  const Eigen::Index n_steps = basis.phi().rows();
  const Eigen::MatrixXd& phi = basis.phi();

  const Trajectory mean_traj = compose_mean(basis, wd.mean(), init);
  Eigen::VectorXd mean(n_steps * n_dims);
  for (Eigen::Index d = 0; d < n_dims; ++d) {
    mean.segment(d * n_steps, n_steps) = mean_traj.values().col(d);
  }

  Eigen::MatrixXd cov(n_steps * n_dims, n_steps * n_dims);
  for (Eigen::Index a = 0; a < n_dims; ++a) {
    const Eigen::MatrixXd left = phi * wd.cov().block(a * block, 0, block, wd.cov().cols());
    for (Eigen::Index b = a; b < n_dims; ++b) {
      Eigen::MatrixXd blk = left.middleCols(b * block, block) * phi.transpose();
      cov.block(a * n_steps, b * n_steps, n_steps, n_steps) = blk;
      if (b != a) {
        cov.block(b * n_steps, a * n_steps, n_steps, n_steps) = blk.transpose();
      }
    }
  }
  cov = symmetrize(cov);
  cov.diagonal().array() += wd.sigma_n_sq();
  return TrajectoryDistribution(basis.grid(), std::move(mean), std::move(cov), n_dims);
}

Eigen::MatrixXd marginal_variances(const WeightDistribution& wd,
                                   const BasisSystem& basis) {
  check_compatible(wd, basis);
  const Eigen::Index block = wd.block_size();
  const Eigen::MatrixXd& phi = basis.phi();
  Eigen::MatrixXd var(phi.rows(), wd.n_dims());
  for (Eigen::Index d = 0; d < wd.n_dims(); ++d) {
    const Eigen::MatrixXd tmp = phi * wd.cov().block(d * block, d * block, block, block);
    var.col(d) = (tmp.array() * phi.array()).rowwise().sum().matrix();
  }
  var.array() += wd.sigma_n_sq();
  return var;
}

std::vector<WeightVector> sample_weights(const WeightDistribution& wd,
                                         std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("sample count must be at least 1");
  const Eigen::MatrixXd factor = covariance_factor(wd.cov());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<WeightVector> out;
  out.reserve(n);
  Eigen::VectorXd z(wd.mean().size());
  for (std::size_t i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = normal(rng);
    out.emplace_back(wd.mean() + factor * z);
  }
  return out;
}

std::vector<Trajectory> sample_trajectories(const WeightDistribution& wd,
                                            const BasisSystem& basis,
                                            const InitialState& init,
                                            std::size_t n, std::uint64_t seed) {
  check_compatible(wd, basis);
  std::vector<Trajectory> out;
  out.reserve(n);
  for (const auto& w : sample_weights(wd, n, seed)) {
    out.push_back(compose_mean(basis, w, init));
  }
  return out;
}

}  // namespace famp::mp
