#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numbers>

#include "convexmoments/constants.hpp"
#include "convexmoments/errors.hpp"
#include "convexmoments/verify.hpp"

using namespace convexmoments;
namespace v = convexmoments::verify;

namespace {

// (E chi_n^p)^{1/p}
double chi_root(int n, double p) {
  return std::exp((0.5 * p * std::log(2.0) + std::lgamma(0.5 * (n + p)) - std::lgamma(0.5 * n)) / p);
}

// (E|g|^p)^{1/p} for a standard normal g
double normal_root(double p) {
  return std::exp((0.5 * p * std::log(2.0) + std::lgamma(0.5 * (p + 1.0)) - 0.5 * std::log(std::numbers::pi)) / p);
}

DistributionSpec iso(Family f, int n, double r = kLogConcave) { return make_distribution(f, n, r, true); }

double row_value(const CheckReport& rep, const std::string& part, double x) {
  for (const auto& row : rep.rows) {
    if (row.value("part", "") == part && std::abs(row.at("x").get<double>() - x) < 1e-12) {
      return row.at("value").get<double>();
    }
  }
  ADD_FAILURE() << "no row " << part << " at " << x;
  return std::nan("");
}

}  // namespace

TEST(StrongWeak, GaussianMatchesChiOracles) {
  const auto rep = v::strong_weak(iso(Family::gaussian, 16), 4.0, 400'000, 3, 1.0);
  const double expected = chi_root(16, 4.0) / (chi_root(16, 1.0) + normal_root(4.0));
  EXPECT_NEAR(expected, 0.784, 0.005);
  // sigma_4 is searched from below, so the ratio can only sit slightly high.
  EXPECT_NEAR(rep.ratio, expected, 0.02);
  EXPECT_EQ(rep.status, CheckStatus::pass);
  EXPECT_EQ(rep.observed.at("c2_factor").get<double>(), 1.0);
}

TEST(StrongWeak, ParetoExamplePassesAtBudgetThree) {
  const auto rep = v::strong_weak(iso(Family::radial_pareto, 8, 10.0), 4.0, 200'000, 5, 3.0);
  EXPECT_EQ(rep.status, CheckStatus::pass);
  EXPECT_DOUBLE_EQ(rep.observed.at("c2_factor").get<double>(), constants::c2_factor(4.0, 10.0));
}

TEST(StrongWeak, ReverseFloorHoldsAndTinyBudgetFails) {
  for (Family f : {Family::gaussian, Family::laplace_product}) {
    const auto rep = v::strong_weak(iso(f, 4), 2.0, 100'000, 1, 1.0);
    EXPECT_LE(rep.observed.at("reverse_floor_ratio").get<double>(), 1.0);
  }
  const auto tiny = v::strong_weak(iso(Family::gaussian, 4), 2.0, 100'000, 1, 0.001);
  EXPECT_EQ(tiny.status, CheckStatus::fail);
  EXPECT_GT(tiny.ratio, 100.0);
}

TEST(StrongWeak, ClaimedRUsesC2) {
  const auto rep = v::strong_weak(iso(Family::gaussian, 4), 1.0, 100'000, 1, 1.0, 4.0);
  EXPECT_DOUBLE_EQ(rep.observed.at("c2_factor").get<double>(), std::pow(4.0 / 3.0, 7.0));
  EXPECT_THROW(v::strong_weak(iso(Family::student_t, 4, 5.0), 6.0, 100'000, 1, 1.0), HypothesisError);
}

TEST(Universality, StudentTAcrossDimensions) {
  const auto rep = v::universality(Family::student_t, 2.0, std::nullopt, {2, 8, 32}, 100'000, 4, 1.0);
  EXPECT_EQ(rep.status, CheckStatus::pass);
  EXPECT_EQ(rep.rows.size(), 3u);
  EXPECT_EQ(rep.params.at("r").get<double>(), 6.0);
  EXPECT_LE(rep.observed.at("spread").get<double>(), 3.0);
  EXPECT_THROW(v::universality(Family::gaussian, 1.0, 4.0, {8}, 100'000, 4, 1.0), std::invalid_argument);
}

TEST(AssumptionH, IntervalGaugeGivesRatioOne) {
  const auto rep = v::assumption_h(iso(Family::gaussian, 4), 1.0, 1.0);
  EXPECT_NEAR(rep.observed.at("moment_ratio").get<double>(), 1.0, 1e-9);
  EXPECT_TRUE(rep.observed.at("origin_inside").get<bool>());
  EXPECT_EQ(rep.status, CheckStatus::pass);
}

TEST(AssumptionH, DiscGaugeMatchesClosedForms) {
  // Rayleigh: (E R^2)^{1/2} / E R = 2 / sqrt(pi).
  const auto g = v::assumption_h(iso(Family::gaussian, 4), 2.0, 1.0, 5.0);
  EXPECT_NEAR(g.observed.at("moment_ratio").get<double>(), 2.0 / std::sqrt(std::numbers::pi), 1e-6);
  const double lambda = std::pow(1.25, 3.0) * std::pow(5.0 / 3.0, 4.0);
  EXPECT_NEAR(g.ratio, 2.0 / std::sqrt(std::numbers::pi) / lambda, 1e-6);
  // Planar marginal of the uniform 4-ball has density proportional to 1 - rho^2:
  // E R = 8/15, E R^2 = 1/3.
  const auto u = v::assumption_h(iso(Family::uniform_ball, 4), 2.0, 1.0);
  EXPECT_NEAR(u.observed.at("moment_ratio").get<double>(), std::sqrt(1.0 / 3.0) / (8.0 / 15.0), 1e-6);
  EXPECT_EQ(u.status, CheckStatus::fail);
  EXPECT_EQ(v::assumption_h(iso(Family::uniform_ball, 4), 2.0, 2.0).status, CheckStatus::pass);
}

TEST(AssumptionH, ParetoExampleAndProjections) {
  const auto spec = iso(Family::radial_pareto, 4, 6.0);
  const auto base = v::assumption_h(spec, 2.0, 4.0);
  EXPECT_EQ(base.status, CheckStatus::pass);
  const auto tilted = v::assumption_h(spec, 2.0, 4.0, std::nullopt, {{2, 1, 0, 0}, {0, 3, 0, 1}});
  EXPECT_DOUBLE_EQ(tilted.ratio, base.ratio);
  const auto flat = v::assumption_h(spec, 2.0, 4.0, std::nullopt, {{1, 1, 0, 0}, {2, 2, 0, 0}});
  EXPECT_EQ(flat.status, CheckStatus::vacuous);
  ASSERT_FALSE(flat.notes.empty());
  EXPECT_NE(flat.notes.front().find("degenerate"), std::string::npos);
  EXPECT_THROW(v::assumption_h(spec, 2.5, 4.0), HypothesisError);
  EXPECT_THROW(v::assumption_h(iso(Family::laplace_product, 4), 1.0, 1.0), HypothesisError);
}

TEST(Tail, StudentTDecayAndDominance) {
  const auto rep = v::tail(iso(Family::student_t, 4, 8.0), {1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0}, 1'000'000, 11, {});
  EXPECT_EQ(rep.status, CheckStatus::pass);
  EXPECT_LE(rep.observed.at("slope").get<double>(), -3.5);
  EXPECT_THROW(v::tail(make_distribution(Family::student_t, 4, 2.0, false), {1.0}, 10'000, 1, {}),
               HypothesisError);
  EXPECT_THROW(v::tail(iso(Family::gaussian, 4), {1.0}, 10'000, 1, {}), HypothesisError);
}

TEST(Negative, ExamplesAndVacuousGate) {
  const auto g = v::negative(iso(Family::gaussian, 16), 1.0, 200'000, 2, 1.0, 1.0);
  EXPECT_EQ(g.status, CheckStatus::pass);
  const auto big_c = v::negative(iso(Family::gaussian, 16), 1.0, 200'000, 2, 1.0, 1e3);
  EXPECT_EQ(big_c.status, CheckStatus::vacuous);
  const auto half = v::negative(iso(Family::radial_pareto, 4, 4.0), 0.5, 200'000, 2, 0.05, 1.0);
  EXPECT_EQ(half.status, CheckStatus::pass);
  EXPECT_THROW(v::negative(iso(Family::gaussian, 4), 2.0, 200'000, 2, 1.0, 1.0), HypothesisError);
}

TEST(SmallBall, GaussianRowsMatchChiSquared) {
  const auto rep = v::small_ball(iso(Family::gaussian, 16), 4.0, {0.0, 0.3, 0.5, 0.7}, 1'000'000, 9, {});
  EXPECT_EQ(rep.status, CheckStatus::pass);
  const double loc = rep.observed.at("location").get<double>();
  EXPECT_NEAR(loc, chi_root(16, 1.0), 1e-9);
  const boost::math::chi_squared chi2(16);
  for (const auto& row : rep.rows) {
    const double eps = row.at("eps").get<double>();
    const double truth = eps == 0.0 ? 0.0 : boost::math::cdf(chi2, eps * eps * loc * loc);
    EXPECT_NEAR(row.at("probability").get<double>(), truth, 1e-3) << "eps " << eps;
  }
  EXPECT_EQ(rep.rows.front().at("probability").get<double>(), 0.0);
}

TEST(SmallBall, GateAndHypotheses) {
  v::SmallBallBudgets strict;
  strict.gate = 100.0;
  const auto rep = v::small_ball(iso(Family::student_t, 8, 10.0), 1.0, {0.1, 0.5}, 100'000, 1, strict);
  EXPECT_EQ(rep.status, CheckStatus::vacuous);
  EXPECT_FALSE(rep.observed.at("gate").get<bool>());
  EXPECT_THROW(v::small_ball(iso(Family::gaussian, 8), 4.0, {0.1}, 100'000, 1, {}), HypothesisError);
  EXPECT_THROW(v::small_ball(iso(Family::gaussian, 8), 0.5, {0.1}, 100'000, 1, {}), HypothesisError);
}

TEST(Borell1d, ClosedCdfExamples) {
  const auto rep = v::borell_1d(3.0, {13}, {}, {1.0, 2.0}, {1.0, 2.0});
  EXPECT_EQ(rep.check_id, "lemma13");
  EXPECT_NEAR(row_value(rep, "borell_tail", 1.0), std::pow(2.5, -3.0), 1e-14);
  // Small ball at the median is linear at zero with slope r Med.
  const double med = std::cbrt(2.0) - 1.0;
  const auto sb = v::borell_1d(3.0, {15}, {}, {1.0}, {1.0}, {1e-6});
  EXPECT_NEAR(row_value(sb, "median_small_ball", 1e-6) / 1e-6, 3.0 * med, 1e-5);
}

TEST(Borell1d, FrozenBudgetsAcrossR) {
  v::BorellBudgets two{2.0, 2.0, 2.0};
  for (double r : {2.0, 3.0, 5.0, 10.0}) {
    EXPECT_EQ(v::borell_1d(r, {13, 14, 15}, two).status, CheckStatus::pass) << "r " << r;
  }
  // The median tail needs C0 above 1/ln 2.
  const auto one = v::borell_1d(10.0, {14}, {});
  EXPECT_EQ(one.status, CheckStatus::fail);
  EXPECT_THROW(v::borell_1d(3.0, {13}, {}, {3.0}), HypothesisError);
  EXPECT_THROW(v::borell_1d(1.0, {13}, {}), HypothesisError);
}

TEST(Borell1d, MomentRatioDivergesNearR) {
  const double r = 5.0;
  std::vector<double> qs = {4.9, 4.99, 4.999};
  const auto rep = v::borell_1d(r, {13}, {}, qs, {1.0});
  double prev = 0.0;
  for (double q : qs) {
    const double ratio = row_value(rep, "moment_ratio", q);
    EXPECT_GT(ratio, prev);
    prev = ratio;
  }
  // Leading behavior (r - q)^{-1/q}: one decade in r - q multiplies by ~10^{1/5}.
  const double growth = row_value(rep, "moment_ratio", 4.999) / row_value(rep, "moment_ratio", 4.99);
  EXPECT_NEAR(std::log10(growth), 1.0 / 5.0, 0.01);
}

TEST(CovarianceSweep, GaussianRate) {
  const auto rep = v::covariance_sweep(iso(Family::gaussian, 16), 7, 9, 3, 4.0);
  EXPECT_EQ(rep.status, CheckStatus::pass);
  EXPECT_EQ(rep.rows.size(), 8u);
  const double slope = rep.observed.at("slope").get<double>();
  EXPECT_GE(slope, -0.65);
  EXPECT_LE(slope, -0.35);
  EXPECT_THROW(v::covariance_sweep(make_distribution(Family::student_t, 4, 2.0, false), 5, 3, 1, 4.0),
               HypothesisError);
  EXPECT_DOUBLE_EQ(v::sweep_r(16), 8.0 * std::log(32.0));
  EXPECT_DOUBLE_EQ(v::sweep_r(1, 1.0), 4.0);
}

TEST(Thinshell, NeverFailsAndGaussianShrinks) {
  const auto rep = v::thinshell(Family::gaussian, std::nullopt, {4, 16, 64}, 0.5, 50'000, 5);
  EXPECT_EQ(rep.status, CheckStatus::pass);
  ASSERT_EQ(rep.rows.size(), 3u);
  EXPECT_GT(rep.rows[0].at("probability").get<double>(), rep.rows[1].at("probability").get<double>());
  EXPECT_GE(rep.rows[1].at("probability").get<double>(), rep.rows[2].at("probability").get<double>());
  const auto heavy = v::thinshell(Family::radial_pareto, std::nullopt, {4, 16}, 0.5, 20'000, 5);
  EXPECT_EQ(heavy.status, CheckStatus::pass);
}

TEST(Geometry, RestrictionConcaveAndLevelSet) {
  for (const auto& [f, n, r, p] : std::vector<std::tuple<Family, int, double, double>>{
           {Family::student_t, 2, 6.0, 2.0}, {Family::radial_pareto, 2, 2.5, 2.0}, {Family::pareto_1d, 1, 3.0, 1.0}}) {
    const auto spec = make_distribution(f, n, r, f != Family::pareto_1d);
    EXPECT_EQ(v::restriction(spec, p).status, CheckStatus::pass);
    EXPECT_EQ(v::concave2(spec, p).status, CheckStatus::pass);
    if (n == 2) EXPECT_EQ(v::polar_levelset(spec, p).status, CheckStatus::pass);
  }
  const auto gauss = iso(Family::gaussian, 2);
  EXPECT_EQ(v::restriction(gauss, 1.5, 6.0).status, CheckStatus::pass);
  EXPECT_THROW(v::restriction(gauss, 1.5), HypothesisError);
  EXPECT_THROW(v::concave2(gauss, 2.0), HypothesisError);
  EXPECT_THROW(v::polar_levelset(gauss, 2.0), HypothesisError);
}

TEST(Geometry, PolarIdentityIsSharp) {
  for (const auto& spec : {iso(Family::gaussian, 2), iso(Family::student_t, 2, 5.0), iso(Family::radial_pareto, 2, 4.0)}) {
    const auto rep = v::polar_formula(spec);
    EXPECT_EQ(rep.status, CheckStatus::pass);
    EXPECT_LE(rep.ratio, 1.0);
  }
}

TEST(ConcavityChecks, MonotoneGAndCenterDensity) {
  const auto l11 = v::lemma11();
  EXPECT_EQ(l11.status, CheckStatus::pass);
  EXPECT_FALSE(l11.rows.empty());
  const auto l12 = v::lemma12();
  EXPECT_EQ(l12.status, CheckStatus::pass);
}

TEST(OracleAgreement, GaussianAndPareto) {
  const auto g = v::oracle_agreement(iso(Family::gaussian, 4), {}, 400'000, 8);
  EXPECT_EQ(g.status, CheckStatus::pass);
  const auto p = v::oracle_agreement(iso(Family::radial_pareto, 4, 12.0), {1.0, 2.0}, 400'000, 8);
  EXPECT_EQ(p.status, CheckStatus::pass);
  bool plain = false;
  for (const auto& row : p.rows) plain = plain || row.at("statistic") == "power_mean";
  EXPECT_TRUE(plain);
  EXPECT_THROW(v::oracle_agreement(iso(Family::laplace_product, 4), {}, 10'000, 1), HypothesisError);
}

TEST(Verify, ReportsAreDeterministic) {
  const auto a = v::negative(iso(Family::student_t, 8, 10.0), 1.0, 100'000, 42, 1.0, 1.0);
  const auto b = v::negative(iso(Family::student_t, 8, 10.0), 1.0, 100'000, 42, 1.0, 1.0);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  EXPECT_EQ(v::capped_samples(1'000'000, 64), 250'000u);
  EXPECT_EQ(v::capped_samples(1'000, 64), 1'000u);
}
