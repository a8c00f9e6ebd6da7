#include "famp/demos/dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "famp/error.hpp"

namespace famp::demos {

namespace {

using nlohmann::json;

json encode_matrix(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(encode_double(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json encode_vector(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(encode_double(v(i)));
  return out;
}

const json& require(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ParseError("missing field '" + where + key + "'");
  }
  return j.at(key);
}

Eigen::VectorXd decode_vector(const json& j, const std::string& field) {
  if (!j.is_array()) throw ParseError("field '" + field + "' must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = decode_double(j[i], field + "[" + std::to_string(i) + "]");
  }
  return v;
}

Eigen::MatrixXd decode_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ParseError("field '" + field + "' must be a non-empty array");
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  if (cols == 0) throw ParseError("field '" + field + "' rows must be non-empty arrays");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string row_field = field + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols) {
      throw ParseError("field '" + row_field + "' has the wrong length");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          decode_double(j[r][c], row_field + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

DemoRecord decode_record(const json& j, std::size_t index) {
  const std::string where = "records[" + std::to_string(index) + "].";
  const double duration = decode_double(require(j, "duration", where), where + "duration");
  Eigen::MatrixXd positions = decode_matrix(require(j, "positions", where), where + "positions");
  Eigen::MatrixXd forces = decode_matrix(require(j, "forces", where), where + "forces");
  if (positions.rows() != forces.rows()) {
    throw ParseError("field '" + where + "forces' row count differs from positions");
  }
  if (positions.rows() < 2) throw ParseError("field '" + where + "positions' needs two rows");
  DemoRecord rec{mp::TimeGrid(duration, static_cast<std::size_t>(positions.rows())),
                 std::move(positions), std::move(forces), {}};
  const json& meta = require(j, "meta", where);
  const std::string mw = where + "meta.";
  try {
    rec.meta.env_hash = require(meta, "env_hash", mw).get<std::string>();
    rec.meta.seed = require(meta, "seed", mw).get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ParseError("field '" + mw + "': " + e.what());
  }
  rec.meta.k_plug = decode_double(require(meta, "k_plug", mw), mw + "k_plug");
  rec.meta.socket_origin = decode_vector(require(meta, "socket_origin", mw), mw + "socket_origin");
  rec.meta.script = meta.value("script", json::object());
  return rec;
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  const auto end = text.begin() + static_cast<std::ptrdiff_t>(std::min(byte, text.size()));
  return 1 + static_cast<std::size_t>(std::count(text.begin(), end, '\n'));
}

}  // namespace

std::string encode_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double decode_double(const nlohmann::json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) throw ParseError("field '" + field + "' is not a number");
  const std::string& s = j.get_ref<const std::string&>();
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || (errno == ERANGE && std::isinf(v))) {
    throw ParseError("field '" + field + "' has invalid number '" + s + "'");
  }
  return v;
}

nlohmann::json dataset_to_json(const DemoDataset& ds) {
  ds.validate();
  json records = json::array();
  for (const auto& r : ds.records) {
    records.push_back({{"dt", encode_double(r.grid.dt())},
                       {"duration", encode_double(r.grid.duration())},
                       {"positions", encode_matrix(r.positions)},
                       {"forces", encode_matrix(r.forces)},
                       {"meta",
                        {{"env_hash", r.meta.env_hash},
                         {"k_plug", encode_double(r.meta.k_plug)},
                         {"socket_origin", encode_vector(r.meta.socket_origin)},
                         {"seed", r.meta.seed},
                         {"script", r.meta.script}}}});
  }
  return {{"schema_version", ds.schema_version}, {"task", ds.task}, {"records", records}};
}

DemoDataset dataset_from_json(const nlohmann::json& j) {
  const json& version = require(j, "schema_version", "");
  if (!version.is_number_integer()) throw ParseError("field 'schema_version' must be an integer");
  if (version.get<int>() != DemoDataset::kSchemaVersion) {
    throw VersionError("unsupported dataset schema_version " + std::to_string(version.get<int>()) +
                       " (supported: " + std::to_string(DemoDataset::kSchemaVersion) + ")");
  }
  DemoDataset ds;
  const json& task = j.contains("task") ? j.at("task") : json("");
  if (!task.is_string()) throw ParseError("field 'task' must be a string");
  ds.task = task.get<std::string>();
  const json& records = require(j, "records", "");
  if (!records.is_array()) throw ParseError("field 'records' must be an array");
  for (std::size_t i = 0; i < records.size(); ++i) {
    ds.records.push_back(decode_record(records[i], i));
  }
  try {
    ds.validate();
  } catch (const Error& e) {
    throw ParseError(std::string("inconsistent dataset: ") + e.what());
  }
  return ds;
}

void save_dataset(const DemoDataset& ds, const std::filesystem::path& path) {
  const json j = dataset_to_json(ds);
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(1) << '\n';
  if (!out) throw ConfigError("failed writing " + path.string());
}

DemoDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": line " + std::to_string(line_of(text, e.byte)) +
                     ": " + e.what());
  }
  return dataset_from_json(j);
}

}  // namespace famp::demos
