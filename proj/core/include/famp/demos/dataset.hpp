#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "famp/demos/script.hpp"

namespace famp::demos {

/// Numbers are written as 17-significant-digit decimal strings so that a
/// load reproduces every double exactly.
nlohmann::json dataset_to_json(const DemoDataset& ds);
DemoDataset dataset_from_json(const nlohmann::json& j);

void save_dataset(const DemoDataset& ds, const std::filesystem::path& path);
/// Throws ParseError (with line/field) or VersionError; never returns a
/// partially read dataset.
DemoDataset load_dataset(const std::filesystem::path& path);

/// Exact decimal encoding helpers shared with the model files.
std::string encode_double(double v);
double decode_double(const nlohmann::json& j, const std::string& field);

}  // namespace famp::demos
