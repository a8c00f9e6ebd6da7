#pragma once

#include <cstddef>

#include "famp/sim/env_config.hpp"

namespace famp::sim {

/// Resistance (N, positive pushes out of the channel) at `depth` for a
/// forward insertion, i.e. with every detent shallower than `depth` already
/// passed.
///
/// Between detents the force follows max(residual of the last click,
/// linear ramp from the previous detent depth); at a detent depth it drops
/// to residual_ratio * peak. Past the last detent the plug may be
/// over-inserted against the residual plus a floor spring.
double detent_force(double depth, const EnvConfig& cfg);

/// Same profile, given how many detents have clicked. Backing out behind the
/// last clicked detent meets a retention spring (negative = pulls inward),
/// limited to that detent's peak.
double contact_resistance(double depth, std::size_t passed, const EnvConfig& cfg);

}  // namespace famp::sim
