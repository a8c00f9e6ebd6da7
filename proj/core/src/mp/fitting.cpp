#include "famp/mp/fitting.hpp"

#include <cmath>
#include <string>

#include <Eigen/QR>

#include "famp/error.hpp"

namespace famp::mp {

Trajectory compose_mean(const BasisSystem& basis, const WeightVector& omega,
                        const InitialState& init) {
  const Eigen::Index block = basis.block_size();
  if (omega.size() == 0 || omega.size() % block != 0) {
    throw ShapeError("weight vector length " + std::to_string(omega.size()) +
                     " is not a multiple of the basis block " +
                     std::to_string(block));
  }
  const Eigen::Index n_dims = omega.size() / block;
  init.validate(n_dims);

  Eigen::MatrixXd values(basis.phi().rows(), n_dims);
  for (Eigen::Index d = 0; d < n_dims; ++d) {
    values.col(d) = basis.xi1() * init.position[d] +
                    basis.xi2() * init.velocity[d] +
                    basis.phi() * omega.segment(d * block, block);
  }
  return Trajectory(basis.grid(), std::move(values));
}

WeightVector fit_weights(const Trajectory& traj, const BasisSystem& basis,
                         const InitialState& init, double ridge) {
  if (!(traj.grid() == basis.grid())) {
    throw ShapeError("trajectory grid differs from basis grid");
  }
  if (ridge < 0.0 || !std::isfinite(ridge)) {
    throw ConfigError("ridge must be a finite non-negative number");
  }
  const Eigen::Index n_dims = traj.n_dims();
  init.validate(n_dims);

  const Eigen::MatrixXd& phi = basis.phi();
  const Eigen::Index block = phi.cols();
  const Eigen::Index rows = phi.rows();

  // Augmented least squares [phi; sqrt(ridge) I] keeps the conditioning of
  // phi from being squared through the normal equations.
  Eigen::MatrixXd design(rows + block, block);
  design.topRows(rows) = phi;
  design.bottomRows(block) =
      std::sqrt(ridge) * Eigen::MatrixXd::Identity(block, block);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (ridge == 0.0 && qr.rank() < block) {
    throw IllConditionedError(
        "basis matrix is rank deficient (rank " + std::to_string(qr.rank()) +
        " of " + std::to_string(block) + "); use a ridge term > 0");
  }

  WeightVector omega(n_dims * block);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows + block);
  for (Eigen::Index d = 0; d < n_dims; ++d) {
    rhs.head(rows) = traj.values().col(d) - basis.xi1() * init.position[d] -
                     basis.xi2() * init.velocity[d];
    omega.segment(d * block, block) = qr.solve(rhs);
  }
  if (!omega.allFinite()) throw NumericError("weight fit produced non-finite values");
  return omega;
}

}  // namespace famp::mp
