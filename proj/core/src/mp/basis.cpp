#include "famp/mp/basis.hpp"

#include <cmath>
#include <string>

#include "famp/error.hpp"

namespace famp::mp {

void DmpConfig::validate() const {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  if (!(alpha_x > 0.0)) throw ConfigError("alpha_x must be positive");
  if (!std::isfinite(tau)) throw ConfigError("tau must be finite");
  if (n_basis < 2) throw ConfigError("n_basis must be at least 2");
  if (!(basis_width > 0.0 && basis_width < 1.0)) {
    throw ConfigError("basis_width must lie in (0, 1)");
  }
  if (substeps < 1) throw ConfigError("substeps must be at least 1");
}

double DmpConfig::resolved_tau(const TimeGrid& grid) const {
  return tau > 0.0 ? tau : grid.duration();
}

BasisSystem::BasisSystem(TimeGrid grid, DmpConfig config, BasisKind kind,
                         Eigen::MatrixXd phi, Eigen::VectorXd xi1,
                         Eigen::VectorXd xi2, std::size_t start_index)
    : grid_(grid),
      config_(config),
      kind_(kind),
      phi_(std::move(phi)),
      xi1_(std::move(xi1)),
      xi2_(std::move(xi2)),
      start_index_(start_index) {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  if (phi_.rows() != n || xi1_.size() != n || xi2_.size() != n) {
    throw ShapeError("basis rows do not match the time grid");
  }
  if (phi_.cols() != static_cast<Eigen::Index>(config_.n_basis + 1)) {
    throw ShapeError("basis must have n_basis + 1 columns");
  }
  if (start_index_ >= grid_.size()) throw ShapeError("basis start index past grid end");
}

Eigen::VectorXd build_phase(const DmpConfig& cfg, const TimeGrid& grid) {
  cfg.validate();
  const double tau = cfg.resolved_tau(grid);
  return (-cfg.alpha_x / tau * grid.times().array()).exp().matrix();
}

BasisCenters basis_centers(const DmpConfig& cfg, double tau) {
  const auto n = static_cast<Eigen::Index>(cfg.n_basis);
  BasisCenters rbf{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t_center = tau * static_cast<double>(i) / static_cast<double>(n - 1);
    rbf.centers[i] = std::exp(-cfg.alpha_x * t_center / tau);
  }
  const double log_overlap = std::log(cfg.basis_width);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index j = i + 1 < n ? i : i - 1;
    const double gap = rbf.centers[j] - rbf.centers[j + 1];
    rbf.widths[i] = -4.0 * log_overlap / (gap * gap);
  }
  return rbf;
}

Eigen::VectorXd normalized_activations(const BasisCenters& rbf, double x) {
  Eigen::VectorXd act =
      (-rbf.widths.array() * (x - rbf.centers.array()).square()).exp().matrix();
  const double total = act.sum();
  if (total > 0.0) return act / total;
  // Far outside every center: fall back to the closest one.
  Eigen::Index closest = 0;
  (x - rbf.centers.array()).abs().minCoeff(&closest);
  act.setZero();
  act[closest] = 1.0;
  return act;
}

namespace {

// All columns of the ProDMP basis integrated together. Column layout:
// [0, n_basis) unit forcing weight, n_basis unit goal, +1 unit start
// position, +2 unit start velocity.
BasisSystem integrate_prodmp(const DmpConfig& cfg, const TimeGrid& grid,
                             std::size_t start_index) {
  const double tau = cfg.resolved_tau(grid);
  const BasisCenters rbf = basis_centers(cfg, tau);
  const auto nb = static_cast<Eigen::Index>(cfg.n_basis);
  const Eigen::Index n_cols = nb + 3;
  const auto n_steps = static_cast<Eigen::Index>(grid.size());

  Eigen::ArrayXd goal = Eigen::ArrayXd::Zero(n_cols);
  goal[nb] = 1.0;
  Eigen::ArrayXd y = Eigen::ArrayXd::Zero(n_cols);
  Eigen::ArrayXd v = Eigen::ArrayXd::Zero(n_cols);
  y[nb + 1] = 1.0;
  v[nb + 2] = 1.0;

  const double tau_sq = tau * tau;
  auto forcing = [&](double t) {
    Eigen::ArrayXd f = Eigen::ArrayXd::Zero(n_cols);
    const double x = std::exp(-cfg.alpha_x * t / tau);
    f.head(nb) = x * normalized_activations(rbf, x).array();
    return f;
  };
  auto accel = [&](const Eigen::ArrayXd& pos, const Eigen::ArrayXd& vel,
                   const Eigen::ArrayXd& f) {
    return (cfg.alpha * (cfg.beta * (goal - pos) - tau * vel) + f) / tau_sq;
  };

  Eigen::MatrixXd samples(n_steps, n_cols);
  for (Eigen::Index r = 0; r <= static_cast<Eigen::Index>(start_index); ++r) {
    samples.row(r) = y.matrix().transpose();
  }

  const double h = grid.dt() / static_cast<double>(cfg.substeps);
  for (Eigen::Index step = static_cast<Eigen::Index>(start_index) + 1;
       step < n_steps; ++step) {
    for (std::size_t s = 0; s < cfg.substeps; ++s) {
      const double t = grid.time(static_cast<std::size_t>(step - 1)) +
                       h * static_cast<double>(s);
      const Eigen::ArrayXd f0 = forcing(t);
      const Eigen::ArrayXd f_half = forcing(t + 0.5 * h);
      const Eigen::ArrayXd f1 = forcing(t + h);

      const Eigen::ArrayXd k1y = v;
      const Eigen::ArrayXd k1v = accel(y, v, f0);
      const Eigen::ArrayXd k2y = v + 0.5 * h * k1v;
      const Eigen::ArrayXd k2v = accel(y + 0.5 * h * k1y, k2y, f_half);
      const Eigen::ArrayXd k3y = v + 0.5 * h * k2v;
      const Eigen::ArrayXd k3v = accel(y + 0.5 * h * k2y, k3y, f_half);
      const Eigen::ArrayXd k4y = v + h * k3v;
      const Eigen::ArrayXd k4v = accel(y + h * k3y, k4y, f1);

      y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
      v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    samples.row(step) = y.matrix().transpose();
  }

  for (Eigen::Index c = 0; c < n_cols; ++c) {
    if (!samples.col(c).allFinite()) {
      const std::string name = c < nb       ? "basis " + std::to_string(c)
                               : c == nb    ? std::string("goal")
                               : c == nb + 1 ? std::string("xi1")
                                             : std::string("xi2");
      throw NumericError("basis integration produced non-finite values in column " + name);
    }
  }

  Eigen::MatrixXd phi = samples.leftCols(nb + 1);
  Eigen::VectorXd xi1 = samples.col(nb + 1);
  Eigen::VectorXd xi2 = samples.col(nb + 2);
  // Exact boundary values; the integrator leaves them untouched but rows
  // before the start are copies of the initial state.
  phi.topRows(static_cast<Eigen::Index>(start_index) + 1).setZero();
  xi1.head(static_cast<Eigen::Index>(start_index) + 1).setOnes();
  xi2.head(static_cast<Eigen::Index>(start_index) + 1).setZero();
  return BasisSystem(grid, cfg, BasisKind::kProDmp, std::move(phi),
                     std::move(xi1), std::move(xi2), start_index);
}

BasisSystem build_promp(const DmpConfig& cfg, const TimeGrid& grid) {
  const double tau = cfg.resolved_tau(grid);
  const BasisCenters rbf = basis_centers(cfg, tau);
  const Eigen::VectorXd phase = build_phase(cfg, grid);
  const auto nb = static_cast<Eigen::Index>(cfg.n_basis);
  const auto n_steps = static_cast<Eigen::Index>(grid.size());

  Eigen::MatrixXd phi(n_steps, nb + 1);
  for (Eigen::Index t = 0; t < n_steps; ++t) {
    phi.row(t).head(nb) = normalized_activations(rbf, phase[t]).transpose();
    phi(t, nb) = 1.0;
  }
  return BasisSystem(grid, cfg, BasisKind::kProMp, std::move(phi),
                     Eigen::VectorXd::Zero(n_steps),
                     Eigen::VectorXd::Zero(n_steps));
}

}  // namespace

BasisSystem build_basis(const DmpConfig& cfg, const TimeGrid& grid,
                        BasisKind kind) {
  cfg.validate();
  return kind == BasisKind::kProDmp ? integrate_prodmp(cfg, grid, 0)
                                    : build_promp(cfg, grid);
}

BasisSystem rebase(const BasisSystem& basis, std::size_t start_index) {
  if (basis.kind() != BasisKind::kProDmp) {
    throw ConfigError("only ProDMP bases can be restarted from a new state");
  }
  if (start_index >= basis.grid().size()) {
    throw ShapeError("restart index past the end of the grid");
  }
  return integrate_prodmp(basis.config(), basis.grid(), start_index);
}

}  // namespace famp::mp
