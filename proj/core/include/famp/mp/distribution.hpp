#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "famp/mp/basis.hpp"
#include "famp/mp/fitting.hpp"
#include "famp/mp/time_grid.hpp"

namespace famp::mp {

/// Gaussian over stacked weight vectors, plus the observation noise that is
/// added on every trajectory sample.
class WeightDistribution {
 public:
  WeightDistribution(Eigen::VectorXd mean, Eigen::MatrixXd cov,
                     Eigen::Index n_dims, double sigma_n_sq = 1e-6);

  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& cov() const { return cov_; }
  Eigen::Index n_dims() const { return n_dims_; }
  Eigen::Index block_size() const { return mean_.size() / n_dims_; }
  double sigma_n_sq() const { return sigma_n_sq_; }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  Eigen::Index n_dims_;
  double sigma_n_sq_;
};

/// Mean and covariance over all steps and dimensions. Entries are ordered
/// dimension-major: index = d * n_steps + t.
class TrajectoryDistribution {
 public:
  TrajectoryDistribution(TimeGrid grid, Eigen::VectorXd mean,
                         Eigen::MatrixXd cov, Eigen::Index n_dims);

  const TimeGrid& grid() const { return grid_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& cov() const { return cov_; }
  Eigen::Index n_dims() const { return n_dims_; }

  Trajectory mean_trajectory() const;
  /// Per-step, per-dimension marginal standard deviation.
  Eigen::MatrixXd marginal_std() const;

 private:
  TimeGrid grid_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  Eigen::Index n_dims_;
};

/// Sample mean and unbiased sample covariance plus eps_reg * I.
WeightDistribution fit_weight_distribution(
    const std::vector<WeightVector>& weights, Eigen::Index n_dims,
    double eps_reg, double sigma_n_sq = 1e-6);

/// 1e-8 * trace(cov) / dim, the default covariance regulariser.
double default_regularizer(const Eigen::MatrixXd& sample_cov);

/// Pushforward of the weight distribution through the basis:
/// mean = xi1 y_b + xi2 ydot_b + H^T mu, cov = H^T Sigma H + sigma_n^2 I.
TrajectoryDistribution trajectory_distribution(const WeightDistribution& wd,
                                               const BasisSystem& basis,
                                               const InitialState& init);

/// Diagonal of the trajectory covariance only, as [n_steps x n_dims]
/// variances. Avoids building the full matrix.
Eigen::MatrixXd marginal_variances(const WeightDistribution& wd,
                                   const BasisSystem& basis);

std::vector<WeightVector> sample_weights(const WeightDistribution& wd,
                                         std::size_t n, std::uint64_t seed);

std::vector<Trajectory> sample_trajectories(const WeightDistribution& wd,
                                            const BasisSystem& basis,
                                            const InitialState& init,
                                            std::size_t n, std::uint64_t seed);

}  // namespace famp::mp
