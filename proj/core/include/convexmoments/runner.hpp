#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "convexmoments/report.hpp"

namespace convexmoments {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfigError = 2;

enum class OutputFormat { json, csv };

/// One configured check. Serializes to the manifest entry that reproduces it.
struct RunConfig {
  std::string check_id;
  std::optional<std::string> family;
  std::optional<int> dim;
  /// +inf for log-concave; for log-concave families a finite r is the
  /// claimed concavity parameter.
  std::optional<double> r;
  std::optional<double> p;
  std::size_t n_samples = 1'000'000;
  /// Mandatory for Monte Carlo checks.
  std::optional<std::uint64_t> seed;
  std::map<std::string, double> budgets;
  /// Check-specific settings (grids, dims, projection, ...).
  nlohmann::json options = nlohmann::json::object();
};

nlohmann::json to_json(const RunConfig& config);
/// Accepts "samples" or "n_samples", "check" or "check_id", r as a number or "inf".
RunConfig config_from_json(const nlohmann::json& j);

/// Known check ids, including the appendix lemmas.
const std::vector<std::string>& check_ids();

/// Runs the check; HypothesisError and std::invalid_argument signal config
/// errors. The config is embedded in params["config"].
CheckReport run_check(const RunConfig& config);

int exit_code(const CheckReport& report);

/// Report text: pretty JSON without runtime, or the CSV of its rows.
std::string render_report(const CheckReport& report, OutputFormat format);
/// Throws std::runtime_error when the file cannot be written.
void write_text(const std::filesystem::path& path, const std::string& text);

struct SuiteRow {
  std::string name;
  std::string check_id;
  std::string status;
  double ratio = 0.0;
  double ratio_upper = 0.0;
  bool pass = false;
  std::string error;
  /// Free-form tags copied from the manifest entry (e.g. acceptance criteria).
  nlohmann::json tags = nlohmann::json::array();
};

struct SuiteSummary {
  std::vector<SuiteRow> rows;
  int exit_code = kExitPass;
};

nlohmann::json to_json(const SuiteSummary& summary);

/// Runs every entry of a manifest (a JSON list of RunConfigs; entries may
/// carry "name" and "criterion"). Writes <name>.json (and <name>.csv when
/// the report has rows) plus summary.json and summary.csv into `out_dir`.
/// Failures and config errors are enumerated, never short-circuited.
SuiteSummary run_suite(const nlohmann::json& manifest, const std::filesystem::path& out_dir);
SuiteSummary run_suite(const std::filesystem::path& manifest, const std::filesystem::path& out_dir);

}  // namespace convexmoments
