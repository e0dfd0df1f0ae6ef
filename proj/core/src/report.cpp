#include "convexmoments/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace convexmoments {

namespace {

nlohmann::json real(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

}  // namespace

std::string_view to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::vacuous: return "vacuous";
  }
  return "unknown";
}

void CheckReport::record(double point_ratio, double upper_ratio) {
  if (std::isnan(point_ratio) || std::isnan(upper_ratio)) {
    record_failure("ratio is NaN");
    return;
  }
  upper_ratio = std::max(upper_ratio, point_ratio);
  if (recorded_ == 0 || upper_ratio > ratio_upper) {
    ratio_upper = upper_ratio;
    ci_slack = upper_ratio - point_ratio;
  }
  ratio = recorded_ == 0 ? point_ratio : std::max(ratio, point_ratio);
  ++recorded_;
}

void CheckReport::record_failure(const std::string& why) {
  hard_failure_ = true;
  notes.push_back(why);
}

void CheckReport::finalize() {
  if (!asserting) {
    status = CheckStatus::pass;
  } else if (hard_failure_) {
    status = CheckStatus::fail;
  } else if (recorded_ == 0) {
    status = CheckStatus::vacuous;
  } else {
    status = ratio_upper <= 1.0 ? CheckStatus::pass : CheckStatus::fail;
  }
}

nlohmann::json to_json(const CheckReport& report, bool include_runtime) {
  nlohmann::json j;
  j["check_id"] = report.check_id;
  j["params"] = report.params;
  j["observed"] = report.observed;
  j["ratio"] = real(report.ratio);
  j["ratio_upper"] = real(report.ratio_upper);
  j["ci_slack"] = real(report.ci_slack);
  j["budget"] = report.budget;
  j["status"] = std::string(to_string(report.status));
  j["pass"] = report.ok();
  j["asserting"] = report.asserting;
  j["notes"] = report.notes;
  if (include_runtime) j["runtime_ms"] = report.runtime_ms;
  if (!report.rows.empty()) j["rows"] = report.rows;
  return j;
}

namespace {

std::string csv_cell(const nlohmann::json& v) {
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    return quoted + '"';
  }
  if (v.is_null()) return "";
  return v.dump();
}

}  // namespace

std::string rows_to_csv(const CheckReport& report) {
  std::ostringstream out;
  if (report.rows.empty()) return {};
  std::vector<std::string> keys;
  for (const auto& [key, _] : report.rows.front().items()) keys.push_back(key);
  for (std::size_t k = 0; k < keys.size(); ++k) out << (k ? "," : "") << keys[k];
  out << '\n';
  for (const auto& row : report.rows) {
    for (std::size_t k = 0; k < keys.size(); ++k) {
      out << (k ? "," : "") << (row.contains(keys[k]) ? csv_cell(row.at(keys[k])) : "");
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace convexmoments
