#include "famp/force/conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "famp/error.hpp"
#include "famp/mp/linalg.hpp"

namespace famp::force {

void JointSpaceConfig::validate() const {
  if (d_pos < 1 || f_force < 1) {
    throw ConfigError("joint space needs at least one position and one force dim");
  }
  if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != total()) {
    throw ConfigError("label count must equal D + F");
  }
}

std::vector<mp::Trajectory> assemble_joint_demos(
    const std::vector<mp::Trajectory>& pos_demos,
    const std::vector<mp::Trajectory>& force_demos) {
  if (pos_demos.empty() || force_demos.empty()) {
    throw InsufficientDataError("no demonstrations to assemble");
  }
  if (pos_demos.size() != force_demos.size()) {
    throw ShapeError("position and force demonstration counts differ");
  }
  std::vector<mp::Trajectory> out;
  out.reserve(pos_demos.size());
  for (std::size_t i = 0; i < pos_demos.size(); ++i) {
    const auto& p = pos_demos[i];
    const auto& f = force_demos[i];
    if (!(p.grid() == f.grid())) {
      throw ShapeError("demonstration " + std::to_string(i) +
                       ": position and force grids differ");
    }
    Eigen::MatrixXd joint(p.n_steps(), p.n_dims() + f.n_dims());
    joint << p.values(), f.values();
    out.emplace_back(p.grid(), std::move(joint));
  }
  return out;
}

void ConditioningSpec::validate(Eigen::Index n_dims) const {
  if (dims.empty()) throw ConfigError("conditioning needs at least one dimension");
  std::set<Eigen::Index> seen;
  for (auto d : dims) {
    if (d < 0 || d >= n_dims) {
      throw ConfigError("conditioning dim " + std::to_string(d) + " out of range");
    }
    if (!seen.insert(d).second) {
      throw ConfigError("conditioning dim " + std::to_string(d) + " repeated");
    }
  }
  const auto n = static_cast<Eigen::Index>(dims.size());
  if (values.size() != n || obs_noise.size() != n) {
    throw ShapeError("conditioning values/noise must match the number of dims");
  }
  if (!values.allFinite()) throw NumericError("conditioning values are not finite");
  if ((obs_noise.array() < 0.0).any() || !obs_noise.allFinite()) {
    throw ConfigError("observation noise must be finite and non-negative");
  }
}

Eigen::MatrixXd observation_matrix(const mp::BasisSystem& basis,
                                   Eigen::Index n_dims, std::size_t step,
                                   const std::vector<Eigen::Index>& dims) {
  const Eigen::Index block = basis.block_size();
  const auto row = static_cast<Eigen::Index>(step);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dims.size()),
                                            n_dims * block);
  for (std::size_t j = 0; j < dims.size(); ++j) {
    a.block(static_cast<Eigen::Index>(j), dims[j] * block, 1, block) =
        basis.phi().row(row);
  }
  return a;
}

mp::WeightDistribution condition(const mp::WeightDistribution& wd,
                                 const mp::BasisSystem& basis,
                                 const mp::InitialState& init,
                                 const ConditioningSpec& spec) {
  const Eigen::Index n_dims = wd.n_dims();
  spec.validate(n_dims);
  init.validate(n_dims);
  if (wd.block_size() != basis.block_size()) {
    throw ShapeError("weight distribution does not match the basis");
  }
  const auto& grid = basis.grid();
  const double half_step = 0.5 * grid.dt();
  if (spec.t_cond < -half_step || spec.t_cond > grid.duration() + half_step) {
    throw ConfigError("t_cond lies outside the time grid");
  }
  const std::size_t step = grid.nearest_index(spec.t_cond);
  const auto row = static_cast<Eigen::Index>(step);

  const Eigen::MatrixXd a = observation_matrix(basis, n_dims, step, spec.dims);
  Eigen::VectorXd homogeneous(a.rows());
  for (Eigen::Index j = 0; j < a.rows(); ++j) {
    const Eigen::Index d = spec.dims[static_cast<std::size_t>(j)];
    homogeneous[j] = basis.xi1()[row] * init.position[d] +
                     basis.xi2()[row] * init.velocity[d];
  }

  const Eigen::MatrixXd& sigma = wd.cov();
  const Eigen::MatrixXd sigma_at = sigma * a.transpose();
  const Eigen::MatrixXd innovation =
      mp::symmetrize(a * sigma_at) + Eigen::MatrixXd(spec.obs_noise.asDiagonal());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(innovation, Eigen::EigenvaluesOnly);
  const double max_eig = es.eigenvalues().maxCoeff();
  const double min_eig = es.eigenvalues().minCoeff();
  if (!(max_eig > 0.0) || min_eig <= 1e-13 * max_eig) {
    throw NumericError(
        "innovation matrix is singular at t_cond; use an observation noise > 0");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(innovation);
  if (llt.info() != Eigen::Success) {
    throw NumericError("innovation matrix is not positive definite; use obs_noise > 0");
  }

  // K = Sigma A^T S^-1
  const Eigen::MatrixXd gain = llt.solve(sigma_at.transpose()).transpose();
  const Eigen::VectorXd residual = spec.values - a * wd.mean() - homogeneous;
  Eigen::VectorXd mean = wd.mean() + gain * residual;

  // Joseph form keeps the posterior symmetric PSD under rounding.
  const Eigen::Index w = sigma.rows();
  const Eigen::MatrixXd i_ka = Eigen::MatrixXd::Identity(w, w) - gain * a;
  Eigen::MatrixXd cov = i_ka * sigma * i_ka.transpose() +
                        gain * spec.obs_noise.asDiagonal() * gain.transpose();
  cov = mp::symmetrize(cov);
  return mp::WeightDistribution(std::move(mean), std::move(cov), n_dims,
                                wd.sigma_n_sq());
}

}  // namespace famp::force
