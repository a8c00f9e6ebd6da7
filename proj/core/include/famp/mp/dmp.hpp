#pragma once

#include <Eigen/Core>

#include "famp/mp/basis.hpp"
#include "famp/mp/fitting.hpp"
#include "famp/mp/time_grid.hpp"

namespace famp::mp {

/// Direct fixed-step RK4 integration of the attractor system for every
/// dimension. `forcing_weights` is [n_dims x n_basis], `goals` has n_dims
/// entries. Independent of the basis construction in `build_basis`.
Trajectory integrate_dmp(const DmpConfig& cfg,
                         const Eigen::MatrixXd& forcing_weights,
                         const Eigen::VectorXd& goals,
                         const InitialState& init, const TimeGrid& grid);

/// Same, with the parameters given as a stacked weight vector.
Trajectory integrate_dmp(const DmpConfig& cfg, const WeightVector& omega,
                         const InitialState& init, const TimeGrid& grid);

}  // namespace famp::mp
