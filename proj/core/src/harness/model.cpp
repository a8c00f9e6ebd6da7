#include "famp/harness/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "famp/demos/dataset.hpp"
#include "famp/demos/normalize.hpp"
#include "famp/error.hpp"
#include "famp/mp/fitting.hpp"

namespace famp::harness {

namespace {

using nlohmann::json;

// Fitting initial state: commanded start for positions, measured start value
// at rest for forces.
mp::InitialState fit_init(const mp::Trajectory& traj, Eigen::Index d_pos) {
  mp::InitialState init = mp::InitialState::from_trajectory(traj);
  init.velocity.tail(init.velocity.size() - d_pos).setZero();
  return init;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::kCic: return "cic";
    case Method::kDmp: return "dmp";
    case Method::kProMp: return "promp";
    case Method::kProDmp: return "prodmp";
    case Method::kFaProDmp: return "faprodmp";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (Method m : kAllMethods) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown method '" + name + "' (expected cic|dmp|promp|prodmp|faprodmp)");
}

bool is_probabilistic(Method m) {
  return m == Method::kProMp || m == Method::kProDmp || m == Method::kFaProDmp;
}

mp::BasisKind Model::basis_kind() const {
  return method == Method::kProMp ? mp::BasisKind::kProMp : mp::BasisKind::kProDmp;
}

mp::BasisSystem Model::basis() const { return mp::build_basis(dmp, grid, basis_kind()); }

force::JointSpaceConfig Model::layout() const {
  if (f_force == 0) throw PreconditionError("model has no force dimensions");
  return force::JointSpaceConfig{d_pos, f_force, {}};
}

Model fit_model(const demos::DemoDataset& ds, Method method, const mp::DmpConfig& dmp) {
  ds.validate();
  dmp.validate();
  if (ds.records.empty()) throw InsufficientDataError("dataset has no records");
  if (is_probabilistic(method) && ds.records.size() < 2) {
    throw InsufficientDataError(to_string(method) + " needs at least 2 demonstrations, got " +
                                std::to_string(ds.records.size()));
  }
  Model model;
  model.method = method;
  model.dmp = dmp;
  model.grid = ds.records.front().grid;
  model.d_pos = ds.records.front().positions.cols();
  model.f_force = method == Method::kFaProDmp ? ds.records.front().forces.cols() : 0;

  if (!is_probabilistic(method)) {
    model.demos = ds;
    return model;
  }

  const mp::BasisSystem basis = model.basis();
  std::vector<mp::WeightVector> weights;
  weights.reserve(ds.records.size());
  for (const auto& rec : ds.records) {
    const demos::DemoRecord r =
        rec.grid == model.grid ? rec : demos::time_normalize(rec, model.grid);
    const mp::Trajectory traj =
        method == Method::kFaProDmp ? r.joint_trajectory() : r.position_trajectory();
    weights.push_back(mp::fit_weights(traj, basis, fit_init(traj, model.d_pos)));
  }

  // Regularizer scaled to the sample covariance trace.
  const auto n = static_cast<double>(weights.size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(weights.front().size());
  for (const auto& w : weights) mean += w;
  mean /= n;
  double trace = 0.0;
  for (const auto& w : weights) trace += (w - mean).squaredNorm();
  trace /= (n - 1.0);
  const Eigen::Index n_dims = model.d_pos + model.f_force;
  const double eps = std::max(1e-8 * trace / static_cast<double>(mean.size()), 1e-12);
  model.weights = mp::fit_weight_distribution(weights, n_dims, eps);
  if (method == Method::kFaProDmp) model.trigger_delta = default_delta(ds);
  return model;
}

double default_delta(const demos::DemoDataset& ds, double factor) {
  const std::size_t n = ds.records.size();
  if (n < 2 || ds.records.front().forces.cols() == 0) return 0.0;
  const Eigen::Index steps = ds.records.front().forces.rows();
  const Eigen::Index f = ds.records.front().forces.cols();
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(steps, f);
  for (const auto& r : ds.records) mean += r.forces;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (const auto& r : ds.records) ss += (r.forces - mean).squaredNorm();
  const double var = ss / (static_cast<double>(n - 1) * static_cast<double>(steps * f));
  return factor * std::sqrt(var);
}

json model_to_json(const Model& model) {
  json j{{"schema_version", Model::kSchemaVersion},
         {"method", to_string(model.method)},
         {"grid",
          {{"duration", demos::encode_double(model.grid.duration())},
           {"n_steps", model.grid.size()}}},
         {"dmp",
          {{"alpha", demos::encode_double(model.dmp.alpha)},
           {"beta", demos::encode_double(model.dmp.beta)},
           {"alpha_x", demos::encode_double(model.dmp.alpha_x)},
           {"tau", demos::encode_double(model.dmp.tau)},
           {"n_basis", model.dmp.n_basis},
           {"basis_width", demos::encode_double(model.dmp.basis_width)},
           {"substeps", model.dmp.substeps}}},
         {"d_pos", model.d_pos},
         {"f_force", model.f_force}};
  if (model.weights) {
    const auto& wd = *model.weights;
    json mean = json::array();
    for (Eigen::Index i = 0; i < wd.mean().size(); ++i) {
      mean.push_back(demos::encode_double(wd.mean()(i)));
    }
    json cov = json::array();
    for (Eigen::Index r = 0; r < wd.cov().rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < wd.cov().cols(); ++c) {
        row.push_back(demos::encode_double(wd.cov()(r, c)));
      }
      cov.push_back(std::move(row));
    }
    j["weights"] = {{"n_dims", wd.n_dims()},
                    {"sigma_n_sq", demos::encode_double(wd.sigma_n_sq())},
                    {"mean", std::move(mean)},
                    {"cov", std::move(cov)}};
    if (model.trigger_delta > 0.0) {
      j["trigger_delta"] = demos::encode_double(model.trigger_delta);
    }
  } else {
    j["demos"] = demos::dataset_to_json(model.demos);
  }
  return j;
}

Model model_from_json(const json& j) {
  try {
    if (j.at("schema_version").get<int>() != Model::kSchemaVersion) {
      throw VersionError("unsupported model schema_version " +
                         j.at("schema_version").dump() + " (supported: " +
                         std::to_string(Model::kSchemaVersion) + ")");
    }
    Model m;
    m.method = parse_method(j.at("method").get<std::string>());
    const json& g = j.at("grid");
    m.grid = mp::TimeGrid(demos::decode_double(g.at("duration"), "grid.duration"),
                          g.at("n_steps").get<std::size_t>());
    const json& d = j.at("dmp");
    m.dmp.alpha = demos::decode_double(d.at("alpha"), "dmp.alpha");
    m.dmp.beta = demos::decode_double(d.at("beta"), "dmp.beta");
    m.dmp.alpha_x = demos::decode_double(d.at("alpha_x"), "dmp.alpha_x");
    m.dmp.tau = demos::decode_double(d.at("tau"), "dmp.tau");
    m.dmp.n_basis = d.at("n_basis").get<std::size_t>();
    m.dmp.basis_width = demos::decode_double(d.at("basis_width"), "dmp.basis_width");
    m.dmp.substeps = d.at("substeps").get<std::size_t>();
    m.dmp.validate();
    m.d_pos = j.at("d_pos").get<Eigen::Index>();
    m.f_force = j.at("f_force").get<Eigen::Index>();
    if (is_probabilistic(m.method)) {
      const json& w = j.at("weights");
      const json& mean = w.at("mean");
      const json& cov = w.at("cov");
      const auto dim = static_cast<Eigen::Index>(mean.size());
      if (static_cast<Eigen::Index>(cov.size()) != dim) {
        throw ParseError("weights.cov must be " + std::to_string(dim) + " square");
      }
      Eigen::VectorXd mu(dim);
      Eigen::MatrixXd sigma(dim, dim);
      for (Eigen::Index r = 0; r < dim; ++r) {
        mu(r) = demos::decode_double(mean.at(static_cast<std::size_t>(r)), "weights.mean");
        const json& row = cov.at(static_cast<std::size_t>(r));
        if (static_cast<Eigen::Index>(row.size()) != dim) {
          throw ParseError("weights.cov row " + std::to_string(r) + " has the wrong length");
        }
        for (Eigen::Index c = 0; c < dim; ++c) {
          sigma(r, c) = demos::decode_double(row.at(static_cast<std::size_t>(c)), "weights.cov");
        }
      }
      m.weights = mp::WeightDistribution(
          std::move(mu), std::move(sigma), w.at("n_dims").get<Eigen::Index>(),
          demos::decode_double(w.at("sigma_n_sq"), "weights.sigma_n_sq"));
      if (j.contains("trigger_delta")) {
        m.trigger_delta = demos::decode_double(j.at("trigger_delta"), "trigger_delta");
      }
    } else {
      m.demos = demos::dataset_from_json(j.at("demos"));
    }
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model: ") + e.what());
  }
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << model_to_json(model).dump(1) << '\n';
  if (!out) throw ConfigError("failed writing " + path.string());
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace famp::harness
