#include "famp/harness/plots.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>

#include "famp/demos/dataset.hpp"
#include "famp/error.hpp"

namespace famp::harness {

namespace {

using nlohmann::json;

json vec(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(demos::encode_double(v(i)));
  return out;
}

Eigen::VectorXd unvec(const json& j, const std::string& field) {
  if (!j.is_array()) throw ParseError("field '" + field + "' must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = demos::decode_double(j[i], field);
  }
  return v;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string cell(const Eigen::VectorXd& v, Eigen::Index i) {
  return i < v.size() ? num(v(i)) : std::string();
}

}  // namespace

json log_to_json(const force::ExecutionLog& log) {
  json records = json::array();
  for (const auto& r : log.records) {
    records.push_back({{"t", demos::encode_double(r.t)},
                       {"desired_position", vec(r.desired_position)},
                       {"actual_position", vec(r.actual_position)},
                       {"expected_force", vec(r.expected_force)},
                       {"expected_force_std", vec(r.expected_force_std)},
                       {"measured_force", vec(r.measured_force)},
                       {"replanned", r.replanned}});
  }
  json events = json::array();
  for (const auto& e : log.events) {
    json dims = json::array();
    for (auto d : e.selected_dims) dims.push_back(d);
    events.push_back({{"t_trigger", demos::encode_double(e.t_trigger)},
                      {"deviations", vec(e.deviations)},
                      {"selected_dims", dims},
                      {"conditioned_values", vec(e.conditioned_values)},
                      {"t_cond", demos::encode_double(e.t_cond)},
                      {"t_mix", demos::encode_double(e.t_mix)}});
  }
  return {{"complete", log.complete}, {"fault", log.fault}, {"records", records},
          {"events", events}};
}

force::ExecutionLog log_from_json(const json& j) {
  try {
    force::ExecutionLog log;
    log.complete = j.at("complete").get<bool>();
    log.fault = j.at("fault").get<std::string>();
    for (const auto& r : j.at("records")) {
      force::StepRecord rec;
      rec.t = demos::decode_double(r.at("t"), "t");
      rec.desired_position = unvec(r.at("desired_position"), "desired_position");
      rec.actual_position = unvec(r.at("actual_position"), "actual_position");
      rec.expected_force = unvec(r.at("expected_force"), "expected_force");
      rec.expected_force_std = unvec(r.at("expected_force_std"), "expected_force_std");
      rec.measured_force = unvec(r.at("measured_force"), "measured_force");
      rec.replanned = r.at("replanned").get<bool>();
      log.records.push_back(std::move(rec));
    }
    for (const auto& e : j.at("events")) {
      force::ReplanEvent ev;
      ev.t_trigger = demos::decode_double(e.at("t_trigger"), "t_trigger");
      ev.deviations = unvec(e.at("deviations"), "deviations");
      for (const auto& d : e.at("selected_dims")) ev.selected_dims.push_back(d.get<Eigen::Index>());
      ev.conditioned_values = unvec(e.at("conditioned_values"), "conditioned_values");
      ev.t_cond = demos::decode_double(e.at("t_cond"), "t_cond");
      ev.t_mix = demos::decode_double(e.at("t_mix"), "t_mix");
      log.events.push_back(std::move(ev));
    }
    return log;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed execution log: ") + e.what());
  }
}

void save_log(const force::ExecutionLog& log, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << log_to_json(log).dump() << '\n';
}

force::ExecutionLog load_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return log_from_json(j);
}

std::vector<std::filesystem::path> export_plots(const force::ExecutionLog& log,
                                                const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  Eigen::Index n_dims = 0;
  for (const auto& r : log.records) {
    n_dims = std::max({n_dims, r.desired_position.size(), r.measured_force.size()});
  }
  for (Eigen::Index d = 0; d < n_dims; ++d) {
    const auto path = out_dir / ("dim_" + std::to_string(d) + ".csv");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << "t,desired_position,actual_position,expected_force,expected_force_lower,"
           "expected_force_upper,measured_force,replanned\n";
    for (const auto& r : log.records) {
      std::string lower;
      std::string upper;
      if (d < r.expected_force.size() && d < r.expected_force_std.size()) {
        lower = num(r.expected_force(d) - r.expected_force_std(d));
        upper = num(r.expected_force(d) + r.expected_force_std(d));
      }
      out << num(r.t) << ',' << cell(r.desired_position, d) << ','
          << cell(r.actual_position, d) << ',' << cell(r.expected_force, d) << ',' << lower
          << ',' << upper << ',' << cell(r.measured_force, d) << ','
          << (r.replanned ? 1 : 0) << '\n';
    }
    written.push_back(path);
  }
  const auto path = out_dir / "replans.csv";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "t_trigger,t_cond,t_mix,selected_dims,deviation_sum\n";
  for (const auto& e : log.events) {
    std::string dims;
    for (std::size_t i = 0; i < e.selected_dims.size(); ++i) {
      dims += (i ? ";" : "") + std::to_string(e.selected_dims[i]);
    }
    out << num(e.t_trigger) << ',' << num(e.t_cond) << ',' << num(e.t_mix) << ',' << dims
        << ',' << num(e.deviations.sum()) << '\n';
  }
  written.push_back(path);
  return written;
}

}  // namespace famp::harness
