#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "famp/mp/basis.hpp"
#include "famp/mp/distribution.hpp"
#include "famp/mp/time_grid.hpp"

namespace famp::force {

/// D position dimensions followed by F force dimensions. D and F are
/// independent; nothing assumes one force axis per position axis.
struct JointSpaceConfig {
  Eigen::Index d_pos = 1;
  Eigen::Index f_force = 1;
  std::vector<std::string> labels;

  Eigen::Index total() const { return d_pos + f_force; }
  Eigen::Index force_index(Eigen::Index f) const { return d_pos + f; }
  void validate() const;
};

/// Column-concatenates position and force demonstrations (positions first).
std::vector<mp::Trajectory> assemble_joint_demos(
    const std::vector<mp::Trajectory>& pos_demos,
    const std::vector<mp::Trajectory>& force_demos);

/// Observation of selected dimensions at one instant.
struct ConditioningSpec {
  double t_cond = 0.0;
  std::vector<Eigen::Index> dims;
  Eigen::VectorXd values;
  /// Observation variance per selected dimension.
  Eigen::VectorXd obs_noise;

  void validate(Eigen::Index n_dims) const;
};

/// Rows of the masked basis matrix at `step` for the selected dims: row j
/// carries phi[step, :] inside the parameter block of dims[j], zeros
/// elsewhere.
Eigen::MatrixXd observation_matrix(const mp::BasisSystem& basis,
                                   Eigen::Index n_dims, std::size_t step,
                                   const std::vector<Eigen::Index>& dims);

/// Gaussian conditioning of the weight distribution on the observation
/// described by `spec`. t_cond snaps to the nearest grid step. The
/// homogeneous response of `init` at that step is subtracted from the
/// observed values.
mp::WeightDistribution condition(const mp::WeightDistribution& wd,
                                 const mp::BasisSystem& basis,
                                 const mp::InitialState& init,
                                 const ConditioningSpec& spec);

}  // namespace famp::force
