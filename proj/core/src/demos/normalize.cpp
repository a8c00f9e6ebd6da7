#include "famp/demos/normalize.hpp"

#include <algorithm>
#include <cmath>

#include "famp/error.hpp"

namespace famp::demos {

Eigen::MatrixXd resample(const Eigen::MatrixXd& values, const mp::TimeGrid& source,
                         const mp::TimeGrid& target) {
  if (values.rows() != static_cast<Eigen::Index>(source.size())) {
    throw ShapeError("values rows do not match the source grid");
  }
  if (target.duration() > source.duration() * (1.0 + 1e-12)) {
    throw ConfigError("target grid runs past the source record");
  }
  if (target == source) return values;
  Eigen::MatrixXd out(static_cast<Eigen::Index>(target.size()), values.cols());
  const double last = static_cast<double>(source.size() - 1);
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double u = std::clamp(target.time(i) / source.dt(), 0.0, last);
    const auto lo = static_cast<Eigen::Index>(std::floor(u));
    const auto hi = std::min<Eigen::Index>(lo + 1, values.rows() - 1);
    const double a = u - static_cast<double>(lo);
    out.row(static_cast<Eigen::Index>(i)) = (1.0 - a) * values.row(lo) + a * values.row(hi);
  }
  return out;
}

DemoRecord time_normalize(const DemoRecord& record, const mp::TimeGrid& target) {
  return {target, resample(record.positions, record.grid, target),
          resample(record.forces, record.grid, target), record.meta};
}

}  // namespace famp::demos
