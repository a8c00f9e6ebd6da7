#include <cmath>
#include <cstdio>
#include <string>

#include "famp/error.hpp"
#include "famp/sim/env_config.hpp"

namespace famp::sim {

void EnvConfig::validate() const {
  if (n_pos_dims < 1 || n_pos_dims > 3) throw ConfigError("n_pos_dims must be 1, 2 or 3");
  if (socket_origin.size() != 0 && socket_origin.size() != n_pos_dims) {
    throw ConfigError("socket_origin must have n_pos_dims entries");
  }
  if (channel_axis.size() != 0) {
    if (channel_axis.size() != n_pos_dims) {
      throw ConfigError("channel_axis must have n_pos_dims entries");
    }
    if (std::abs(channel_axis.norm() - 1.0) > 1e-9) {
      throw ConfigError("channel_axis must be a unit vector");
    }
  }
  if (detents.empty()) throw ConfigError("at least one detent is required");
  double prev = 0.0;
  for (const auto& d : detents) {
    if (!(d.depth > prev)) throw ConfigError("detent depths must be positive and strictly increasing");
    if (!(d.peak_scale > 0.0)) throw ConfigError("detent peak_scale must be positive");
    prev = d.depth;
  }
  if (!(k_plug > 0.0)) throw ConfigError("k_plug must be positive");
  if (!(residual_ratio >= 0.0 && residual_ratio < 1.0)) {
    throw ConfigError("residual_ratio must lie in [0, 1)");
  }
  if (!(lateral_stiffness >= 0.0)) throw ConfigError("lateral_stiffness must be non-negative");
  if (!(kp > 0.0)) throw ConfigError("kp must be positive");
  if (!(mass > 0.0)) throw ConfigError("mass must be positive");
  if (!(sensor_noise_std >= 0.0)) throw ConfigError("sensor_noise_std must be non-negative");
  if (!(dt > 0.0) || !(control_dt >= dt)) throw ConfigError("need 0 < dt <= control_dt");
  const double ratio = control_dt / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-6) {
    throw ConfigError("control_dt must be a multiple of dt");
  }
  if (required_clicks > detents.size()) {
    throw ConfigError("required_clicks exceeds the number of detents");
  }
}

Eigen::VectorXd EnvConfig::origin() const {
  return socket_origin.size() == 0 ? Eigen::VectorXd::Zero(n_pos_dims) : socket_origin;
}

Eigen::VectorXd EnvConfig::axis() const {
  if (channel_axis.size() != 0) return channel_axis;
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n_pos_dims);
  if (n_pos_dims == 1) {
    a[0] = 1.0;
  } else if (orientation == Orientation::kVertical) {
    a[n_pos_dims - 1] = -1.0;  // straight down
  } else {
    a[n_pos_dims - 2] = 1.0;  // along +y
  }
  return a;
}

Eigen::VectorXd EnvConfig::start_position() const {
  return origin() + start_depth * axis();
}

double EnvConfig::damping() const {
  return kd > 0.0 ? kd : 2.0 * std::sqrt(kp * mass);
}

std::size_t EnvConfig::substeps_per_control() const {
  return static_cast<std::size_t>(std::llround(control_dt / dt));
}

std::size_t EnvConfig::clicks_required() const {
  return required_clicks == 0 ? detents.size() : required_clicks;
}

double EnvConfig::peak(std::size_t i) const {
  const double prev = i == 0 ? 0.0 : detents[i - 1].depth;
  return k_plug * detents[i].peak_scale * (detents[i].depth - prev);
}

double EnvConfig::max_peak() const {
  double best = 0.0;
  for (std::size_t i = 0; i < detents.size(); ++i) best = std::max(best, peak(i));
  return best;
}

double EnvConfig::seat_depth() const { return detents[clicks_required() - 1].depth; }

Eigen::VectorXd EnvConfig::seat_point() const {
  return origin() + seat_depth() * axis();
}

namespace {

std::vector<double> to_vec(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd from_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

nlohmann::json to_json(const EnvConfig& cfg) {
  nlohmann::json detents = nlohmann::json::array();
  for (const auto& d : cfg.detents) {
    detents.push_back({{"depth", d.depth}, {"peak_scale", d.peak_scale}});
  }
  return {
      {"n_pos_dims", cfg.n_pos_dims},
      {"orientation", cfg.orientation == Orientation::kVertical ? "vertical" : "horizontal"},
      {"socket_origin", to_vec(cfg.origin())},
      {"channel_axis", to_vec(cfg.axis())},
      {"detents", detents},
      {"k_plug", cfg.k_plug},
      {"residual_ratio", cfg.residual_ratio},
      {"lateral_stiffness", cfg.lateral_stiffness},
      {"kp", cfg.kp},
      {"kd", cfg.kd},
      {"mass", cfg.mass},
      {"sensor_noise_std", cfg.sensor_noise_std},
      {"dt", cfg.dt},
      {"control_dt", cfg.control_dt},
      {"seed", cfg.seed},
      {"start_depth", cfg.start_depth},
      {"required_clicks", cfg.required_clicks},
  };
}

EnvConfig env_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("environment config must be a JSON object");
  EnvConfig cfg;
  try {
    cfg.n_pos_dims = j.value("n_pos_dims", cfg.n_pos_dims);
    if (j.contains("orientation")) {
      const auto o = j.at("orientation").get<std::string>();
      if (o == "vertical") {
        cfg.orientation = Orientation::kVertical;
      } else if (o == "horizontal") {
        cfg.orientation = Orientation::kHorizontal;
      } else {
        throw ConfigError("unknown orientation '" + o + "'");
      }
    }
    if (j.contains("socket_origin")) {
      cfg.socket_origin = from_vec(j.at("socket_origin").get<std::vector<double>>());
    }
    if (j.contains("channel_axis")) {
      cfg.channel_axis = from_vec(j.at("channel_axis").get<std::vector<double>>());
    }
    if (j.contains("detents")) {
      cfg.detents.clear();
      for (const auto& d : j.at("detents")) {
        cfg.detents.push_back({d.at("depth").get<double>(), d.value("peak_scale", 1.0)});
      }
    }
    cfg.k_plug = j.value("k_plug", cfg.k_plug);
    cfg.residual_ratio = j.value("residual_ratio", cfg.residual_ratio);
    cfg.lateral_stiffness = j.value("lateral_stiffness", cfg.lateral_stiffness);
    cfg.kp = j.value("kp", cfg.kp);
    cfg.kd = j.value("kd", cfg.kd);
    cfg.mass = j.value("mass", cfg.mass);
    cfg.sensor_noise_std = j.value("sensor_noise_std", cfg.sensor_noise_std);
    cfg.dt = j.value("dt", cfg.dt);
    cfg.control_dt = j.value("control_dt", cfg.control_dt);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.start_depth = j.value("start_depth", cfg.start_depth);
    cfg.required_clicks = j.value("required_clicks", cfg.required_clicks);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid environment config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string env_hash(const EnvConfig& cfg) {
  const std::string text = to_json(cfg).dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace famp::sim
