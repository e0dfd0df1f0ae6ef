#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace convexmoments {

enum class CheckStatus { pass, fail, vacuous };

std::string_view to_string(CheckStatus status);

/// Outcome of one verification. `ratio` is observed/bound at the point
/// estimates (worst row); `ratio_upper` is the same quantity with every
/// estimate moved to the unfavorable end of its 95% interval. A check passes
/// when ratio_upper <= 1, so ci_slack = ratio_upper - ratio is the margin the
/// Monte Carlo noise consumed.
struct CheckReport {
  std::string check_id;
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json observed = nlohmann::json::object();
  double ratio = 0.0;
  double ratio_upper = 0.0;
  double ci_slack = 0.0;
  double budget = 1.0;
  CheckStatus status = CheckStatus::vacuous;
  /// Exploratory checks never fail.
  bool asserting = true;
  std::vector<std::string> notes;
  std::int64_t runtime_ms = 0;
  /// Grid rows (flat objects) for the optional CSV output.
  nlohmann::json rows = nlohmann::json::array();

  /// Adds one asserted comparison. Rows are tracked by their worst ratio.
  void record(double point_ratio, double upper_ratio);
  /// Adds a hard failure that is not expressed as a ratio.
  void record_failure(const std::string& why);
  /// Sets status from the recorded comparisons.
  void finalize();
  bool ok() const noexcept { return status != CheckStatus::fail; }

 private:
  int recorded_ = 0;
  bool hard_failure_ = false;
};

/// Report as JSON. runtime_ms is wall-clock dependent, so it is only written
/// on request; the remaining fields are reproducible.
nlohmann::json to_json(const CheckReport& report, bool include_runtime = false);

/// CSV of report.rows; the header is the key set of the first row.
std::string rows_to_csv(const CheckReport& report);

}  // namespace convexmoments
