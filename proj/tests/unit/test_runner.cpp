#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "convexmoments/distributions.hpp"
#include "convexmoments/errors.hpp"
#include "convexmoments/runner.hpp"

using namespace convexmoments;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("convexmoments_runner_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::json quick_negative(double budget_c) {
  return {{"check", "negative"}, {"family", "student_t"}, {"dim", 8}, {"r", 10}, {"p", 1},
          {"samples", 100000},   {"seed", 7},             {"budgets", {{"c", budget_c}}}};
}

}  // namespace

TEST(Runner, KnownChecks) {
  const auto& ids = check_ids();
  for (const char* id : {"strong-weak", "universality", "H", "tail", "negative", "smallball", "borell-1d", "lemma11",
                         "lemma12", "lemma13", "lemma14", "lemma15", "restriction", "concave2", "polar-formula",
                         "polar-levelset", "cov-sweep", "thinshell", "oracle-agreement"}) {
    EXPECT_NE(std::find(ids.begin(), ids.end(), id), ids.end()) << id;
  }
}

TEST(Runner, ConfigRoundTrip) {
  RunConfig c;
  c.check_id = "smallball";
  c.family = "gaussian";
  c.dim = 16;
  c.r = kLogConcave;
  c.p = 4.0;
  c.n_samples = 250'000;
  c.seed = 99;
  c.budgets = {{"bound", 2.0}, {"gate", 0.5}};
  c.options = {{"eps_grid", {0.1, 0.2}}};
  const auto j = to_json(c);
  EXPECT_EQ(j.at("r"), "inf");
  const auto back = config_from_json(j);
  EXPECT_EQ(to_json(back), j);
  EXPECT_TRUE(std::isinf(*back.r));

  const auto alias = config_from_json({{"check_id", "tail"}, {"n_samples", 1e5}, {"r", 8}});
  EXPECT_EQ(alias.check_id, "tail");
  EXPECT_EQ(alias.n_samples, 100'000u);
  EXPECT_EQ(*alias.r, 8.0);
  EXPECT_THROW(config_from_json({{"family", "gaussian"}}), std::invalid_argument);
  EXPECT_THROW(config_from_json({{"check", "tail"}, {"r", "big"}}), std::invalid_argument);
  EXPECT_THROW(config_from_json({{"check", "tail"}, {"samples", 2.5}}), std::invalid_argument);
  EXPECT_THROW(config_from_json(nlohmann::json::array()), std::invalid_argument);
}

TEST(Runner, ExitCodesAndConfigErrors) {
  const auto pass = run_check(config_from_json(quick_negative(1.0)));
  EXPECT_EQ(exit_code(pass), kExitPass);
  const auto fail = run_check(config_from_json(quick_negative(1e3)));
  EXPECT_EQ(fail.status, CheckStatus::fail);
  EXPECT_EQ(exit_code(fail), kExitFail);

  auto no_seed = quick_negative(1.0);
  no_seed.erase("seed");
  EXPECT_THROW(run_check(config_from_json(no_seed)), std::invalid_argument);
  auto outside = quick_negative(1.0);
  outside["p"] = 12;
  EXPECT_THROW(run_check(config_from_json(outside)), HypothesisError);
  EXPECT_THROW(run_check(config_from_json({{"check", "no-such-check"}})), std::invalid_argument);
  EXPECT_THROW(run_check(config_from_json({{"check", "lemma13"}})), std::invalid_argument);
}

TEST(Runner, VacuousCountsAsPass) {
  auto j = quick_negative(1.0);
  j["budgets"]["C"] = 1e3;
  const auto rep = run_check(config_from_json(j));
  EXPECT_EQ(rep.status, CheckStatus::vacuous);
  EXPECT_EQ(exit_code(rep), kExitPass);
}

TEST(Runner, RenderedReportsOmitRuntime) {
  const auto rep = run_check(config_from_json({{"check", "lemma14"}, {"r", 3}, {"budgets", {{"lemma14", 2}}}}));
  const auto text = render_report(rep, OutputFormat::json);
  EXPECT_EQ(text.find("runtime_ms"), std::string::npos);
  const auto j = nlohmann::json::parse(text);
  EXPECT_EQ(j.at("params").at("config").at("check"), "lemma14");
  const auto csv = render_report(rep, OutputFormat::csv);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), static_cast<long>(rep.rows.size()) + 1);
}

TEST(Suite, EmptyManifest) {
  const auto dir = scratch("empty");
  const auto summary = run_suite(nlohmann::json::array(), dir);
  EXPECT_TRUE(summary.rows.empty());
  EXPECT_EQ(summary.exit_code, kExitPass);
  EXPECT_EQ(slurp(dir / "summary.csv"), "name,check_id,status,ratio,ratio_upper,pass\n");
  EXPECT_THROW(run_suite(nlohmann::json::object(), dir), std::invalid_argument);
  EXPECT_THROW(run_suite(dir / "missing.json", dir), std::invalid_argument);
}

TEST(Suite, EnumeratesFailuresAndErrors) {
  const auto dir = scratch("mixed");
  auto failing = quick_negative(1e3);
  failing["name"] = "deliberate_failure";
  failing["criterion"] = 5;
  const nlohmann::json manifest = {quick_negative(1.0), failing, {{"check", "tail"}, {"family", "gaussian"}}};
  const auto summary = run_suite(manifest, dir);
  ASSERT_EQ(summary.rows.size(), 3u);
  EXPECT_EQ(summary.exit_code, kExitConfigError);
  EXPECT_EQ(summary.rows[0].name, "000_negative");
  EXPECT_TRUE(summary.rows[0].pass);
  EXPECT_EQ(summary.rows[1].name, "deliberate_failure");
  EXPECT_EQ(summary.rows[1].status, "fail");
  EXPECT_EQ(summary.rows[1].tags, nlohmann::json::array({5}));
  EXPECT_EQ(summary.rows[2].status, "error");
  EXPECT_FALSE(summary.rows[2].error.empty());
  EXPECT_TRUE(fs::exists(dir / "000_negative.json"));
  EXPECT_TRUE(fs::exists(dir / "deliberate_failure.json"));
  EXPECT_FALSE(fs::exists(dir / "002_tail.json"));

  const auto on_disk = nlohmann::json::parse(slurp(dir / "summary.json"));
  EXPECT_EQ(on_disk.at("rows").size(), 3u);
  EXPECT_EQ(on_disk.at("exit_code"), kExitConfigError);
  const auto csv = slurp(dir / "summary.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);

  const auto only_fail = run_suite(nlohmann::json::array({quick_negative(1.0), failing}), scratch("fail"));
  EXPECT_EQ(only_fail.exit_code, kExitFail);
}

TEST(Suite, RerunIsByteIdentical) {
  const nlohmann::json manifest = {quick_negative(1.0),
                                   {{"check", "smallball"}, {"family", "gaussian"}, {"dim", 8}, {"p", 2},
                                    {"samples", 100000}, {"seed", 3}},
                                   {{"check", "lemma15"}, {"r", 5}}};
  const auto a = scratch("rerun_a"), b = scratch("rerun_b");
  run_suite(manifest, a);
  run_suite(manifest, b);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    const auto other = b / e.path().filename();
    ASSERT_TRUE(fs::exists(other)) << other;
    EXPECT_EQ(slurp(e.path()), slurp(other)) << e.path().filename();
  }
  // Summary pair, three reports, and CSVs for the two checks with grid rows.
  EXPECT_EQ(files, 2u + 3u + 2u);
}
