#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "famp/demos/script.hpp"
#include "famp/force/conditioning.hpp"
#include "famp/mp/basis.hpp"
#include "famp/mp/distribution.hpp"

namespace famp::harness {

enum class Method { kCic, kDmp, kProMp, kProDmp, kFaProDmp };

inline constexpr Method kAllMethods[] = {Method::kCic, Method::kDmp, Method::kProMp,
                                         Method::kProDmp, Method::kFaProDmp};

std::string to_string(Method m);
/// Accepts cic, dmp, promp, prodmp, faprodmp. Throws ConfigError otherwise.
Method parse_method(const std::string& name);
bool is_probabilistic(Method m);

/// A fitted policy. Probabilistic methods carry a weight distribution over the
/// columns they were trained on; CIC and DMP keep the raw demonstrations.
struct Model {
  static constexpr int kSchemaVersion = 1;
  Method method = Method::kFaProDmp;
  mp::DmpConfig dmp;
  mp::TimeGrid grid{1.0, 2};
  /// f_force is zero for position-only models.
  Eigen::Index d_pos = 0;
  Eigen::Index f_force = 0;
  std::optional<mp::WeightDistribution> weights;
  demos::DemoDataset demos;
  /// Default replanning threshold from the training force spread (FA only).
  double trigger_delta = 0.0;

  mp::BasisKind basis_kind() const;
  mp::BasisSystem basis() const;
  force::JointSpaceConfig layout() const;
};

/// Fits `method` on every record of `ds`. Probabilistic methods need at
/// least two records (InsufficientDataError otherwise).
Model fit_model(const demos::DemoDataset& ds, Method method, const mp::DmpConfig& dmp);

/// Force deviation threshold of `factor` times the pooled per-step force
/// standard deviation across the records of `ds`. Zero when there is no force
/// data or fewer than two records.
double default_delta(const demos::DemoDataset& ds, double factor = 3.0);

nlohmann::json model_to_json(const Model& model);
Model model_from_json(const nlohmann::json& j);
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace famp::harness
