#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "famp/mp/time_grid.hpp"

namespace famp::mp {

/// Parameters of the second-order attractor system
///   tau^2 y'' = alpha (beta (g - y) - tau y') + f(x),   tau x' = -alpha_x x
/// with forcing f(x) = x * sum_i phi_i(x) w_i / sum_i phi_i(x).
struct DmpConfig {
  double alpha = 25.0;
  double beta = 25.0 / 4.0;
  double alpha_x = 3.0;
  /// Movement time constant in seconds. Non-positive means "use the grid
  /// duration", resolved by `resolved_tau`.
  double tau = 0.0;
  std::size_t n_basis = 10;
  /// Activation of a basis function halfway between its center and the
  /// neighbouring center.
  double basis_width = 0.3;
  /// RK4 substeps per grid interval.
  std::size_t substeps = 10;

  void validate() const;
  double resolved_tau(const TimeGrid& grid) const;

  bool operator==(const DmpConfig& other) const = default;
};

enum class BasisKind { kProDmp, kProMp };

/// Sampled basis of one scalar dimension. Row t of `phi` maps the per-dim
/// parameter block [w_0 .. w_{n-1}, g] to the value at step t; `xi1` and
/// `xi2` are the responses to a unit start position / start velocity.
///
/// A basis built with a start index k > 0 (see `rebase`) describes motion that
/// starts at grid step k; rows before k hold the start value unchanged.
class BasisSystem {
 public:
  BasisSystem(TimeGrid grid, DmpConfig config, BasisKind kind,
              Eigen::MatrixXd phi, Eigen::VectorXd xi1, Eigen::VectorXd xi2,
              std::size_t start_index = 0);

  const TimeGrid& grid() const { return grid_; }
  const DmpConfig& config() const { return config_; }
  BasisKind kind() const { return kind_; }
  const Eigen::MatrixXd& phi() const { return phi_; }
  const Eigen::VectorXd& xi1() const { return xi1_; }
  const Eigen::VectorXd& xi2() const { return xi2_; }
  std::size_t start_index() const { return start_index_; }
  /// Parameters per dimension (n_basis + 1).
  Eigen::Index block_size() const { return phi_.cols(); }

 private:
  TimeGrid grid_;
  DmpConfig config_;
  BasisKind kind_;
  Eigen::MatrixXd phi_;
  Eigen::VectorXd xi1_;
  Eigen::VectorXd xi2_;
  std::size_t start_index_;
};

/// Phase x(t) = exp(-alpha_x t / tau) on the grid.
Eigen::VectorXd build_phase(const DmpConfig& cfg, const TimeGrid& grid);

/// Phase-space centers and widths of the Gaussian basis functions.
struct BasisCenters {
  Eigen::VectorXd centers;
  Eigen::VectorXd widths;
};
BasisCenters basis_centers(const DmpConfig& cfg, double tau);

/// Normalised basis activations phi_i(x) / sum_j phi_j(x) at phase x.
Eigen::VectorXd normalized_activations(const BasisCenters& rbf, double x);

BasisSystem build_basis(const DmpConfig& cfg, const TimeGrid& grid,
                        BasisKind kind);

/// ProDMP basis for a motion that restarts at grid step `start_index` from a
/// new initial state. The phase keeps running from t = 0.
BasisSystem rebase(const BasisSystem& basis, std::size_t start_index);

}  // namespace famp::mp
