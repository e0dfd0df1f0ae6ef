#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "convexmoments/constants.hpp"
#include "convexmoments/distributions.hpp"
#include "convexmoments/errors.hpp"
#include "convexmoments/estimators.hpp"
#include "convexmoments/runner.hpp"

using namespace convexmoments;

namespace {

struct CommonFlags {
  std::string family;
  int dim = 0;
  std::string r;
  std::optional<double> p;
  std::string samples = "1e6";
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "json";
  std::string options;
  std::string config;
};

double parse_real(const std::string& text, const char* what) {
  if (text == "inf") return kLogConcave;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size()) throw std::invalid_argument(std::string("cannot parse ") + what + ": " + text);
  return v;
}

std::size_t parse_count(const std::string& text) {
  const double v = parse_real(text, "--samples");
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e12) throw std::invalid_argument("--samples must be a positive integer");
  return static_cast<std::size_t>(v);
}

// Pulls --budget.<name> <value> and --budget.<name>=<value> out of argv,
// since their names are open-ended.
std::map<std::string, double> take_budgets(std::vector<std::string>& args) {
  std::map<std::string, double> budgets;
  std::vector<std::string> rest;
  const std::string prefix = "--budget.";
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind(prefix, 0) != 0) {
      rest.push_back(a);
      continue;
    }
    std::string key = a.substr(prefix.size());
    std::string value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (i + 1 >= args.size()) throw std::invalid_argument(a + " needs a value");
      value = args[++i];
    }
    if (key.empty()) throw std::invalid_argument("empty budget name");
    budgets[key] = parse_real(value, a.c_str());
  }
  args = rest;
  return budgets;
}

void add_common(CLI::App* cmd, CommonFlags& f, bool with_p = true) {
  cmd->add_option("--family", f.family, "gaussian, student_t, radial_pareto, uniform_ball, laplace_product, pareto_1d");
  cmd->add_option("--dim", f.dim, "dimension n");
  cmd->add_option("--r", f.r, "concavity parameter r, or inf");
  if (with_p) cmd->add_option("--p", f.p, "moment order p");
  cmd->add_option("--samples", f.samples, "number of draws (e.g. 1e6)");
  cmd->add_option("--seed", f.seed, "master seed (mandatory for Monte Carlo checks)");
  cmd->add_option("--out", f.out, "output file (stdout when omitted)");
  cmd->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--options", f.options, "check-specific settings as a JSON object");
  cmd->add_option("--config", f.config, "run config JSON file; flags override its fields");
}

RunConfig build_config(const std::string& check_id, const CommonFlags& f, const std::map<std::string, double>& budgets) {
  RunConfig c;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw std::invalid_argument("cannot read config " + f.config);
    nlohmann::json j;
    in >> j;
    if (!j.contains("check") && !j.contains("check_id")) j["check"] = check_id;
    c = config_from_json(j);
  }
  if (!check_id.empty()) c.check_id = check_id;
  if (!f.family.empty()) c.family = f.family;
  if (f.dim > 0) c.dim = f.dim;
  if (!f.r.empty()) c.r = parse_real(f.r, "--r");
  if (f.p) c.p = *f.p;
  if (f.config.empty() || f.samples != "1e6") c.n_samples = parse_count(f.samples);
  if (f.seed) c.seed = *f.seed;
  for (const auto& [k, v] : budgets) c.budgets[k] = v;
  if (!f.options.empty()) {
    const auto extra = nlohmann::json::parse(f.options);
    if (!extra.is_object()) throw std::invalid_argument("--options must be a JSON object");
    for (const auto& [k, v] : extra.items()) c.options[k] = v;
  }
  return c;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text(out, text);
  }
}

OutputFormat format_of(const CommonFlags& f) { return f.format == "csv" ? OutputFormat::csv : OutputFormat::json; }

int run_and_emit(const RunConfig& config, const CommonFlags& f) {
  const CheckReport report = run_check(config);
  emit(render_report(report, format_of(f)), f.out);
  std::cerr << report.check_id << ": " << to_string(report.status) << " (ratio " << report.ratio << ", upper "
            << report.ratio_upper << ", " << report.runtime_ms << " ms)\n";
  return exit_code(report);
}

DistributionSpec spec_from_flags(const CommonFlags& f) {
  if (f.family.empty() || f.dim < 1) throw std::invalid_argument("--family and --dim are required");
  const double r = f.r.empty() ? kLogConcave : parse_real(f.r, "--r");
  return make_distribution(parse_family(f.family), f.dim, r, true);
}

std::uint64_t need_seed(const CommonFlags& f) {
  if (!f.seed) throw std::invalid_argument("--seed is mandatory");
  return *f.seed;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::map<std::string, double> budgets;
  try {
    budgets = take_budgets(args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  CLI::App app{"Moment inequalities for convex measures: sampling, estimators and checks"};
  app.require_subcommand(1);

  CommonFlags sample_f, moments_f, verify_f, sweep_f, appendix_f, thin_f;
  std::string check_id, lemma_id, manifest, suite_out = "reports";
  double const_p = 0.0;
  std::string const_r;
  std::optional<int> const_m;

  auto* sample_cmd = app.add_subcommand("sample", "draw a seeded batch");
  add_common(sample_cmd, sample_f, false);
  auto* const_cmd = app.add_subcommand("constants", "print the structure factors for (p, r, m)");
  const_cmd->add_option("--p", const_p, "moment order")->required();
  const_cmd->add_option("--r", const_r, "concavity parameter r, or inf")->required();
  const_cmd->add_option("--m", const_m, "rank m (default ceil(p))");
  auto* moments_cmd = app.add_subcommand("moments", "strong, weak, negative moments and median of a batch");
  add_common(moments_cmd, moments_f);
  auto* verify_cmd = app.add_subcommand("verify", "run one check");
  verify_cmd->add_option("check-id", check_id, "check id")->required();
  add_common(verify_cmd, verify_f);
  auto* sweep_cmd = app.add_subcommand("cov-sweep", "covariance approximation sweep");
  add_common(sweep_cmd, sweep_f, false);
  auto* appendix_cmd = app.add_subcommand("appendix", "appendix lemma checks (lemma11 ... lemma15)");
  appendix_cmd->add_option("lemma-id", lemma_id, "lemma11, lemma12, lemma13, lemma14 or lemma15")
      ->required()
      ->check(CLI::IsMember({"lemma11", "lemma12", "lemma13", "lemma14", "lemma15"}));
  add_common(appendix_cmd, appendix_f, false);
  auto* thin_cmd = app.add_subcommand("thinshell", "exploratory thin-shell probabilities");
  add_common(thin_cmd, thin_f, false);
  auto* suite_cmd = app.add_subcommand("suite", "run a manifest of checks");
  suite_cmd->add_option("manifest", manifest, "JSON list of run configs")->required();
  suite_cmd->add_option("--out", suite_out, "report directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  try {
    if (*sample_cmd) {
      const auto spec = spec_from_flags(sample_f);
      const auto batch = sample(spec, need_seed(sample_f), parse_count(sample_f.samples));
      std::ostringstream out;
      if (sample_f.format == "csv") {
        for (int j = 0; j < spec.dim(); ++j) out << (j ? "," : "") << 'x' << j;
        out << '\n';
        for (std::size_t i = 0; i < batch.count(); ++i) {
          const auto row = batch.row(i);
          for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << nlohmann::json(row[j]).dump();
          out << '\n';
        }
      } else {
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t i = 0; i < batch.count(); ++i) {
          const auto row = batch.row(i);
          rows.push_back(std::vector<double>(row.begin(), row.end()));
        }
        out << nlohmann::json{{"spec", to_json(spec)}, {"seed", batch.seed()}, {"rows", rows}}.dump() << '\n';
      }
      emit(out.str(), sample_f.out);
      return kExitPass;
    }
    if (*const_cmd) {
      const auto bundle = constants::constant_bundle(const_p, parse_real(const_r, "--r"), const_m);
      std::cout << constants::to_json(bundle).dump(2) << '\n';
      return kExitPass;
    }
    if (*moments_cmd) {
      if (!moments_f.p) throw std::invalid_argument("--p is required");
      const double p = *moments_f.p;
      const auto spec = spec_from_flags(moments_f);
      const auto batch = sample(spec, need_seed(moments_f), parse_count(moments_f.samples));
      nlohmann::json j;
      j["spec"] = to_json(spec);
      j["strong"] = to_json(strong_moment(batch, p));
      j["mean_norm"] = to_json(strong_moment(batch, 1.0));
      j["weak"] = to_json(weak_moment(batch, p));
      if (p < 0.5 * spec.dim() && batch.count() >= kMinNegativeSamples) j["negative"] = to_json(negative_moment(batch, p));
      j["median"] = to_json(median_norm(batch));
      emit(j.dump(2) + "\n", moments_f.out);
      return kExitPass;
    }
    if (*verify_cmd) return run_and_emit(build_config(check_id, verify_f, budgets), verify_f);
    if (*sweep_cmd) return run_and_emit(build_config("cov-sweep", sweep_f, budgets), sweep_f);
    if (*appendix_cmd) return run_and_emit(build_config(lemma_id, appendix_f, budgets), appendix_f);
    if (*thin_cmd) return run_and_emit(build_config("thinshell", thin_f, budgets), thin_f);
    if (*suite_cmd) {
      const auto summary = run_suite(std::filesystem::path(manifest), std::filesystem::path(suite_out));
      for (const auto& row : summary.rows) {
        std::cout << row.name << ' ' << row.check_id << ' ' << row.status << ' ' << row.ratio_upper;
        if (!row.error.empty()) std::cout << " error: " << row.error;
        std::cout << '\n';
      }
      return summary.exit_code;
    }
  } catch (const HypothesisError& e) {
    std::cerr << "hypothesis violated: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
  return kExitConfigError;
}
