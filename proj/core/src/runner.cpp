#include "convexmoments/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "convexmoments/distributions.hpp"
#include "convexmoments/errors.hpp"
#include "convexmoments/verify.hpp"

namespace convexmoments {

namespace {

double budget(const RunConfig& c, const std::string& key, double fallback) {
  const auto it = c.budgets.find(key);
  return it == c.budgets.end() ? fallback : it->second;
}

template <typename T>
T option(const RunConfig& c, const char* key, T fallback) {
  return c.options.contains(key) ? c.options.at(key).get<T>() : fallback;
}

const std::string& need_family(const RunConfig& c) {
  if (!c.family) throw std::invalid_argument(c.check_id + " needs --family");
  return *c.family;
}

double need_p(const RunConfig& c) {
  if (!c.p) throw std::invalid_argument(c.check_id + " needs --p");
  return *c.p;
}

std::uint64_t need_seed(const RunConfig& c) {
  if (!c.seed) throw std::invalid_argument(c.check_id + " needs an explicit --seed");
  return *c.seed;
}

// Spec plus the claimed r for log-concave families.
struct ResolvedSpec {
  DistributionSpec spec;
  std::optional<double> claimed_r;
};

ResolvedSpec resolve_spec(const RunConfig& c, int default_dim = 0) {
  const Family family = parse_family(need_family(c));
  const int dim = c.dim.value_or(default_dim);
  if (dim < 1) throw std::invalid_argument(c.check_id + " needs --dim");
  const double r = c.r.value_or(kLogConcave);
  const bool normalize = option<bool>(c, "normalize", true);
  ResolvedSpec out{make_distribution(family, dim, r, normalize), std::nullopt};
  if (out.spec.log_concave() && c.r && std::isfinite(*c.r)) out.claimed_r = *c.r;
  return out;
}

std::vector<double> grid(const RunConfig& c, const char* key, std::vector<double> fallback) {
  return c.options.contains(key) ? c.options.at(key).get<std::vector<double>>() : fallback;
}

using Handler = std::function<CheckReport(const RunConfig&)>;

CheckReport borell_lemmas(const RunConfig& c, std::set<int> lemmas) {
  if (!c.r) throw std::invalid_argument(c.check_id + " needs --r");
  if (c.options.contains("lemmas")) lemmas = c.options.at("lemmas").get<std::set<int>>();
  verify::BorellBudgets b;
  b.lemma13 = budget(c, "lemma13", budget(c, "budget", 1.0));
  b.lemma14 = budget(c, "lemma14", budget(c, "budget", 1.0));
  b.lemma15 = budget(c, "lemma15", budget(c, "budget", 1.0));
  return verify::borell_1d(*c.r, lemmas, b, grid(c, "q_grid", {}), grid(c, "t_grid", {}), grid(c, "eps_grid", {}));
}

const std::map<std::string, Handler>& registry() {
  static const std::map<std::string, Handler> handlers = {
      {"strong-weak",
       [](const RunConfig& c) {
         const auto s = resolve_spec(c);
         return verify::strong_weak(s.spec, need_p(c), c.n_samples, need_seed(c), budget(c, "budget", 1.0),
                                   s.claimed_r);
       }},
      {"universality",
       [](const RunConfig& c) {
         const double p = need_p(c);
         return verify::universality(parse_family(need_family(c)), p, c.r,
                                     option<std::vector<int>>(c, "dims", {2, 4, 8, 16, 32, 64}), c.n_samples,
                                     need_seed(c), budget(c, "budget", 1.0));
       }},
      {"H",
       [](const RunConfig& c) {
         const auto s = resolve_spec(c);
         return verify::assumption_h(s.spec, need_p(c), budget(c, "budget", 1.0), s.claimed_r,
                                     option<std::vector<std::vector<double>>>(c, "projection", {}));
       }},
      {"tail",
       [](const RunConfig& c) {
         const auto s = resolve_spec(c);
         verify::TailBudgets b;
         b.paouris = budget(c, "paouris", budget(c, "budget", 1.0));
         b.projection = budget(c, "projection", 1.0);
         return verify::tail(s.spec, grid(c, "t_grid", {1.0, 1.25, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0, 8.0}),
                             c.n_samples, need_seed(c), b, s.claimed_r);
       }},
      {"negative",
       [](const RunConfig& c) {
         const auto s = resolve_spec(c);
         return verify::negative(s.spec, need_p(c), c.n_samples, need_seed(c), budget(c, "c", 1.0),
                                 budget(c, "C", 1.0), s.claimed_r);
       }},
      {"smallball",
       [](const RunConfig& c) {
         const auto s = resolve_spec(c);
         verify::SmallBallBudgets b;
         b.bound = budget(c, "bound", budget(c, "budget", 1.0));
         b.gate = budget(c, "gate", 1.0);
         b.exponent = budget(c, "exponent", 1.0);
         return verify::small_ball(s.spec, need_p(c), grid(c, "eps_grid", {0.0, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7}),
                                   c.n_samples, need_seed(c), b, s.claimed_r);
       }},
      {"borell-1d", [](const RunConfig& c) { return borell_lemmas(c, {13, 14, 15}); }},
      {"lemma13", [](const RunConfig& c) { return borell_lemmas(c, {13}); }},
      {"lemma14", [](const RunConfig& c) { return borell_lemmas(c, {14}); }},
      {"lemma15", [](const RunConfig& c) { return borell_lemmas(c, {15}); }},
      {"lemma11", [](const RunConfig&) { return verify::lemma11(); }},
      {"lemma12", [](const RunConfig&) { return verify::lemma12(); }},
      {"restriction",
       [](const RunConfig& c) {
         const auto s = resolve_spec(c);
         return verify::restriction(s.spec, need_p(c), s.claimed_r);
       }},
      {"concave2",
       [](const RunConfig& c) {
         const auto s = resolve_spec(c);
         return verify::concave2(s.spec, need_p(c), s.claimed_r);
       }},
      {"polar-formula",
       [](const RunConfig& c) {
         const auto s = resolve_spec(c, 2);
         return verify::polar_formula(s.spec, option<double>(c, "tol", 1e-6));
       }},
      {"polar-levelset",
       [](const RunConfig& c) {
         const auto s = resolve_spec(c);
         return verify::polar_levelset(s.spec, need_p(c), s.claimed_r);
       }},
      {"cov-sweep",
       [](const RunConfig& c) {
         RunConfig local = c;
         const Family family = parse_family(need_family(c));
         const int dim = c.dim.value_or(16);
         local.dim = dim;
         if (!local.r && (family == Family::student_t || family == Family::radial_pareto)) {
           local.r = verify::sweep_r(dim);
         }
         const auto s = resolve_spec(local);
         return verify::covariance_sweep(s.spec, option<int>(c, "k_max", 9), option<int>(c, "seeds", 20),
                                         need_seed(c), budget(c, "budget", 1.0));
       }},
      {"thinshell",
       [](const RunConfig& c) {
         return verify::thinshell(parse_family(need_family(c)), c.r, option<std::vector<int>>(c, "dims", {4, 16, 64}),
                                  option<double>(c, "t", 0.5), c.n_samples, need_seed(c));
       }},
      {"oracle-agreement",
       [](const RunConfig& c) {
         const auto s = resolve_spec(c);
         return verify::oracle_agreement(s.spec, grid(c, "p_grid", {}), c.n_samples, need_seed(c),
                                         option<double>(c, "z", 3.0));
       }},
  };
  return handlers;
}

nlohmann::json real(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

std::string entry_name(const nlohmann::json& entry, std::size_t index) {
  if (entry.is_object() && entry.contains("name")) return entry.at("name").get<std::string>();
  std::ostringstream s;
  s << (index < 10 ? "00" : index < 100 ? "0" : "") << index;
  if (entry.is_object() && (entry.contains("check") || entry.contains("check_id"))) {
    s << '_' << entry.value("check", entry.value("check_id", std::string()));
  }
  return s.str();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

}  // namespace

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["check"] = c.check_id;
  if (c.family) j["family"] = *c.family;
  if (c.dim) j["dim"] = *c.dim;
  if (c.r) j["r"] = real(*c.r);
  if (c.p) j["p"] = *c.p;
  j["samples"] = c.n_samples;
  if (c.seed) j["seed"] = *c.seed;
  j["budgets"] = c.budgets;
  j["options"] = c.options;
  return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("run config must be a JSON object");
  RunConfig c;
  if (j.contains("check")) {
    c.check_id = j.at("check").get<std::string>();
  } else if (j.contains("check_id")) {
    c.check_id = j.at("check_id").get<std::string>();
  } else {
    throw std::invalid_argument("run config needs \"check\"");
  }
  if (j.contains("family")) c.family = j.at("family").get<std::string>();
  if (j.contains("dim")) c.dim = j.at("dim").get<int>();
  if (j.contains("r")) {
    const auto& r = j.at("r");
    if (r.is_string()) {
      if (r.get<std::string>() != "inf") throw std::invalid_argument("r must be a number or \"inf\"");
      c.r = kLogConcave;
    } else {
      c.r = r.get<double>();
    }
  }
  if (j.contains("p")) c.p = j.at("p").get<double>();
  const char* samples_key = j.contains("samples") ? "samples" : "n_samples";
  if (j.contains(samples_key)) {
    const double n = j.at(samples_key).get<double>();
    if (!(n >= 1.0) || n != std::floor(n)) throw std::invalid_argument("samples must be a positive integer");
    c.n_samples = static_cast<std::size_t>(n);
  }
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("budgets")) c.budgets = j.at("budgets").get<std::map<std::string, double>>();
  if (j.contains("options")) c.options = j.at("options");
  return c;
}

const std::vector<std::string>& check_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const auto& [id, _] : registry()) out.push_back(id);
    return out;
  }();
  return ids;
}

CheckReport run_check(const RunConfig& config) {
  const auto& handlers = registry();
  const auto it = handlers.find(config.check_id);
  if (it == handlers.end()) throw std::invalid_argument("unknown check id: " + config.check_id);
  const auto start = std::chrono::steady_clock::now();
  CheckReport report = it->second(config);
  report.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - start).count();
  report.params["config"] = to_json(config);
  return report;
}

int exit_code(const CheckReport& report) { return report.ok() ? kExitPass : kExitFail; }

std::string render_report(const CheckReport& report, OutputFormat format) {
  if (format == OutputFormat::csv) return rows_to_csv(report);
  return to_json(report).dump(2) + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

nlohmann::json to_json(const SuiteSummary& summary) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : summary.rows) {
    nlohmann::json row = {{"name", r.name}, {"check_id", r.check_id}, {"status", r.status},
                          {"ratio", real(r.ratio)}, {"ratio_upper", real(r.ratio_upper)}, {"pass", r.pass}};
    if (!r.error.empty()) row["error"] = r.error;
    if (!r.tags.empty()) row["criterion"] = r.tags;
    rows.push_back(row);
  }
  return {{"rows", rows}, {"exit_code", summary.exit_code}};
}

SuiteSummary run_suite(const nlohmann::json& manifest, const std::filesystem::path& out_dir) {
  if (!manifest.is_array()) throw std::invalid_argument("manifest must be a JSON list of run configs");
  SuiteSummary summary;
  bool any_fail = false, any_error = false;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const auto& entry = manifest[i];
    SuiteRow row;
    row.name = entry_name(entry, i);
    if (entry.is_object() && entry.contains("criterion")) {
      row.tags = entry.at("criterion").is_array() ? entry.at("criterion") : nlohmann::json::array({entry.at("criterion")});
    }
    try {
      const RunConfig config = config_from_json(entry);
      row.check_id = config.check_id;
      const CheckReport report = run_check(config);
      row.status = std::string(to_string(report.status));
      row.ratio = report.ratio;
      row.ratio_upper = report.ratio_upper;
      row.pass = report.ok();
      write_text(out_dir / (row.name + ".json"), render_report(report, OutputFormat::json));
      if (!report.rows.empty()) write_text(out_dir / (row.name + ".csv"), render_report(report, OutputFormat::csv));
      any_fail = any_fail || !row.pass;
    } catch (const std::exception& e) {
      row.status = "error";
      row.error = e.what();
      any_error = true;
    }
    summary.rows.push_back(row);
  }
  summary.exit_code = any_error ? kExitConfigError : any_fail ? kExitFail : kExitPass;

  std::ostringstream csv;
  csv << "name,check_id,status,ratio,ratio_upper,pass\n";
  for (const auto& r : summary.rows) {
    csv << csv_escape(r.name) << ',' << csv_escape(r.check_id) << ',' << r.status << ','
        << real(r.ratio).dump() << ',' << real(r.ratio_upper).dump() << ','
        << (r.pass ? "true" : "false") << '\n';
  }
  write_text(out_dir / "summary.json", to_json(summary).dump(2) + "\n");
  write_text(out_dir / "summary.csv", csv.str());
  return summary;
}

SuiteSummary run_suite(const std::filesystem::path& manifest, const std::filesystem::path& out_dir) {
  std::ifstream in(manifest);
  if (!in) throw std::invalid_argument("cannot read manifest " + manifest.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("manifest is not valid JSON: ") + e.what());
  }
  return run_suite(j, out_dir);
}

}  // namespace convexmoments
