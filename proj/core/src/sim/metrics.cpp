#include "famp/sim/metrics.hpp"

#include <algorithm>

namespace famp::sim {

Metrics evaluate(const Eigen::VectorXd& final_position, std::size_t clicks,
                 double max_force, bool complete, const EnvConfig& cfg,
                 std::size_t required_clicks) {
  EnvConfig target = cfg;
  target.required_clicks = required_clicks;
  Metrics m;
  m.final_position_error = (final_position - target.seat_point()).norm();
  m.clicks = clicks;
  m.inserted = clicks >= target.clicks_required();
  m.max_force = max_force;
  m.incomplete = !complete;
  return m;
}

Metrics metrics(const EpisodeLog& log, const EnvConfig& cfg,
                std::size_t required_clicks) {
  double max_force = 0.0;
  for (const auto& rec : log.records) {
    max_force = std::max(max_force, rec.measured_force.norm());
  }
  return evaluate(log.final_state.position, log.final_state.passed_detents, max_force,
                  log.complete, cfg, required_clicks);
}

}  // namespace famp::sim
