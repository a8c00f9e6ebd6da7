#pragma once

#include <vector>

#include <Eigen/Core>

#include "famp/mp/basis.hpp"
#include "famp/mp/time_grid.hpp"

namespace famp::mp {

/// Stacked parameters of all dimensions, dimension-major:
/// [dim0: w_0..w_{n-1}, g | dim1: w_0..w_{n-1}, g | ...].
using WeightVector = Eigen::VectorXd;

/// values[t, d] = xi1[t] y_b[d] + xi2[t] ydot_b[d] + phi[t, :] omega_d.
Trajectory compose_mean(const BasisSystem& basis, const WeightVector& omega,
                        const InitialState& init);

/// Ridge regression per dimension of the trajectory residual left after the
/// homogeneous (initial-state) response. `ridge` = 0 requests a plain least
/// squares fit and fails on rank deficiency. The penalty is ridge * |omega|^2.
/// Forcing columns are small, so any ridge biases their weights noticeably.
WeightVector fit_weights(const Trajectory& traj, const BasisSystem& basis,
                         const InitialState& init, double ridge = 1e-9);

}  // namespace famp::mp
