#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "famp/force/monitor.hpp"

namespace famp::harness {

nlohmann::json log_to_json(const force::ExecutionLog& log);
force::ExecutionLog log_from_json(const nlohmann::json& j);
void save_log(const force::ExecutionLog& log, const std::filesystem::path& path);
/// Throws ConfigError if the file cannot be read, ParseError if malformed.
force::ExecutionLog load_log(const std::filesystem::path& path);

/// Writes dim_<d>.csv per position dimension (desired, actual, expected force
/// with a one-std band, measured force) and replans.csv with one marker row
/// per replan event. Returns the written paths.
std::vector<std::filesystem::path> export_plots(const force::ExecutionLog& log,
                                                const std::filesystem::path& out_dir);

}  // namespace famp::harness
