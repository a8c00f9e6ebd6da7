#pragma once

#include "famp/demos/script.hpp"
#include "famp/mp/time_grid.hpp"

namespace famp::demos {

/// Linear interpolation of positions and forces onto `target`. Throws
/// ConfigError if the target grid runs past the record.
DemoRecord time_normalize(const DemoRecord& record, const mp::TimeGrid& target);

/// Same interpolation on a bare matrix sampled on `source`.
Eigen::MatrixXd resample(const Eigen::MatrixXd& values, const mp::TimeGrid& source,
                         const mp::TimeGrid& target);

}  // namespace famp::demos
