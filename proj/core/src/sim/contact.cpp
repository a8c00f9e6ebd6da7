#include "famp/sim/contact.hpp"

#include <algorithm>

namespace famp::sim {

double contact_resistance(double depth, std::size_t passed, const EnvConfig& cfg) {
  const auto& detents = cfg.detents;
  const std::size_t n = detents.size();
  passed = std::min(passed, n);
  if (passed == 0 && depth <= 0.0) return 0.0;

  const double last_depth = passed > 0 ? detents[passed - 1].depth : 0.0;
  const double residual = passed > 0 ? cfg.residual_ratio * cfg.peak(passed - 1) : 0.0;

  if (depth < last_depth) {
    const double k_back = cfg.k_plug * detents[passed - 1].peak_scale;
    return std::max(residual - k_back * (last_depth - depth), -cfg.peak(passed - 1));
  }
  if (passed == n) {
    const double k_floor = cfg.k_plug * detents[n - 1].peak_scale;
    return residual + k_floor * (depth - last_depth);
  }
  const double ramp = cfg.k_plug * detents[passed].peak_scale * (depth - last_depth);
  return std::max(residual, ramp);
}

double detent_force(double depth, const EnvConfig& cfg) {
  std::size_t passed = 0;
  while (passed < cfg.detents.size() && cfg.detents[passed].depth < depth) ++passed;
  return contact_resistance(depth, passed, cfg);
}

}  // namespace famp::sim
