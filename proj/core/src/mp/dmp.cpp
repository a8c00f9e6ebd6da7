#include "famp/mp/dmp.hpp"

#include <cmath>
#include <string>

#include "famp/error.hpp"

namespace famp::mp {

namespace {

struct State {
  double y;
  double v;
};

}  // namespace

Trajectory integrate_dmp(const DmpConfig& cfg,
                         const Eigen::MatrixXd& forcing_weights,
                         const Eigen::VectorXd& goals,
                         const InitialState& init, const TimeGrid& grid) {
  cfg.validate();
  const Eigen::Index n_dims = goals.size();
  if (forcing_weights.rows() != n_dims ||
      forcing_weights.cols() != static_cast<Eigen::Index>(cfg.n_basis)) {
    throw ShapeError("forcing weights must be [n_dims x n_basis]");
  }
  init.validate(n_dims);

  const double tau = cfg.resolved_tau(grid);
  const BasisCenters rbf = basis_centers(cfg, tau);
  const double h = grid.dt() / static_cast<double>(cfg.substeps);
  const auto n_steps = static_cast<Eigen::Index>(grid.size());

  Eigen::MatrixXd values(n_steps, n_dims);
  for (Eigen::Index d = 0; d < n_dims; ++d) {
    const Eigen::VectorXd w = forcing_weights.row(d).transpose();
    const double g = goals[d];
    auto accel = [&](double t, const State& s) {
      const double x = std::exp(-cfg.alpha_x * t / tau);
      const double f = x * normalized_activations(rbf, x).dot(w);
      return (cfg.alpha * (cfg.beta * (g - s.y) - tau * s.v) + f) / (tau * tau);
    };

    State s{init.position[d], init.velocity[d]};
    values(0, d) = s.y;
    for (Eigen::Index step = 1; step < n_steps; ++step) {
      for (std::size_t k = 0; k < cfg.substeps; ++k) {
        const double t = grid.time(static_cast<std::size_t>(step - 1)) +
                         h * static_cast<double>(k);
        const State k1{s.v, accel(t, s)};
        const State s2{s.y + 0.5 * h * k1.y, s.v + 0.5 * h * k1.v};
        const State k2{s2.v, accel(t + 0.5 * h, s2)};
        const State s3{s.y + 0.5 * h * k2.y, s.v + 0.5 * h * k2.v};
        const State k3{s3.v, accel(t + 0.5 * h, s3)};
        const State s4{s.y + h * k3.y, s.v + h * k3.v};
        const State k4{s4.v, accel(t + h, s4)};
        s.y += h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
        s.v += h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
      }
      if (!std::isfinite(s.y) || !std::isfinite(s.v)) {
        throw NumericError("DMP integration diverged in dimension " +
                           std::to_string(d) + " at step " + std::to_string(step));
      }
      values(step, d) = s.y;
    }
  }
  return Trajectory(grid, std::move(values));
}

Trajectory integrate_dmp(const DmpConfig& cfg, const WeightVector& omega,
                         const InitialState& init, const TimeGrid& grid) {
  const auto block = static_cast<Eigen::Index>(cfg.n_basis + 1);
  if (omega.size() == 0 || omega.size() % block != 0) {
    throw ShapeError("weight vector length is not a multiple of n_basis + 1");
  }
  const Eigen::Index n_dims = omega.size() / block;
  Eigen::MatrixXd w(n_dims, block - 1);
  Eigen::VectorXd g(n_dims);
  for (Eigen::Index d = 0; d < n_dims; ++d) {
    w.row(d) = omega.segment(d * block, block - 1).transpose();
    g[d] = omega[d * block + block - 1];
  }
  return integrate_dmp(cfg, w, g, init, grid);
}

}  // namespace famp::mp
