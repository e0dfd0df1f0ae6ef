#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "convexmoments/constants.hpp"
#include "convexmoments/geometry.hpp"

using namespace convexmoments;
using namespace convexmoments::geometry;

namespace {

double std_normal(double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi); }

Density2D from_spec(const DistributionSpec& spec) {
  return [spec](double x, double y) {
    const double pt[2] = {x, y};
    return std::exp(density_log(spec, pt));
  };
}

// Five convex f on the line, each with min f = 1.
struct ConvexCase {
  const char* name;
  std::function<double(double)> f;
  std::vector<double> kinks;
};

std::vector<ConvexCase> convex_cases() {
  return {
      {"abs", [](double t) { return 1.0 + std::abs(t); }, {0.0}},
      {"tilted_abs", [](double t) { return 1.0 + std::abs(t) + 0.5 * t; }, {0.0}},
      {"quadratic", [](double t) { return 1.0 + t * t; }, {0.0}},
      {"two_slopes", [](double t) { return std::max(1.0 - t, 1.0 + 3.0 * t); }, {0.0}},
      {"cosh_tilt", [](double t) { return std::cosh(t) + t / 3.0; }, {0.0}},
  };
}

}  // namespace

TEST(Geometry, GaussianIntervalAtAlphaE) {
  const auto body = level_set_1d(std_normal, std::numbers::e);
  EXPECT_NEAR(body.a, -std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(body.b, std::sqrt(2.0), 1e-9);
  EXPECT_TRUE(body.contains_origin);
  EXPECT_THROW(level_set_1d(std_normal, 0.5), std::invalid_argument);
}

TEST(Geometry, ParetoIntervalClosedForm) {
  const auto spec = make_distribution(Family::pareto_1d, 1, 3.0, false);
  const auto body = level_set_1d(
      [&](double t) {
        const double x[1] = {t};
        return std::exp(density_log(spec, x));
      },
      16.0);
  EXPECT_NEAR(body.a, -1.0, 1e-9);
  EXPECT_NEAR(body.b, 1.0, 1e-9);
}

TEST(Geometry, SymmetricDensityGivesSymmetricBody) {
  const auto g = [](double t) { return std::pow(1.0 + t * t / 3.0, -2.0); };
  for (double alpha : {1.5, 4.0, 100.0}) {
    const auto body = level_set_1d(g, alpha);
    EXPECT_NEAR(body.a, -body.b, 1e-9);
  }
}

TEST(Geometry, PlanarGaussianDisc) {
  const auto spec = make_distribution(Family::gaussian, 2, kLogConcave, false);
  const auto body = level_set_2d(from_spec(spec), std::numbers::e);
  ASSERT_EQ(body.ray_lengths.size(), 720u);
  for (double l : body.ray_lengths) EXPECT_NEAR(l, 2.0, 1e-8);
  EXPECT_TRUE(body.convex());
  const auto fine = level_set_2d(from_spec(spec), std::numbers::e, 1440);
  EXPECT_LE(std::abs(body.volume() - fine.volume()) / fine.volume(), 1e-4);
  EXPECT_NEAR(fine.volume(), 4.0 * std::numbers::pi, 1e-3);
}

TEST(Geometry, GaugeClosedForms) {
  LevelSetBody body;
  body.dim = 1;
  body.a = -1.0;
  body.b = 2.0;
  body.contains_origin = true;
  const double x[1] = {4.0}, y[1] = {-3.0}, z[1] = {0.0};
  EXPECT_DOUBLE_EQ(gauge_eval(body, x), 2.0);
  EXPECT_DOUBLE_EQ(gauge_eval(body, y), 3.0);
  EXPECT_DOUBLE_EQ(gauge_eval(body, z), 0.0);
  body.contains_origin = false;
  EXPECT_THROW(gauge_eval(body, x), std::invalid_argument);
}

TEST(Geometry, PolygonGaugeIsSubadditive) {
  // Product Laplace: the level sets are diamonds, not discs.
  const auto spec = make_distribution(Family::laplace_product, 2, kLogConcave, false);
  const auto body = level_set_2d(from_spec(spec), 3.0);
  ASSERT_TRUE(body.convex(1e-9));
  const double vertex[2] = {2.0 * std::log(3.0), 0.0};
  EXPECT_NEAR(gauge_eval(body, vertex), 1.0, 1e-8);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0.0, 2.0);
  for (int i = 0; i < 10'000; ++i) {
    const double x[2] = {normal(rng), normal(rng)}, y[2] = {normal(rng), normal(rng)};
    const double s[2] = {x[0] + y[0], x[1] + y[1]};
    ASSERT_LE(gauge_eval(body, s), (gauge_eval(body, x) + gauge_eval(body, y)) * (1.0 + 1e-9));
  }
}

TEST(Geometry, BodiesAreNestedInAlpha) {
  const auto spec = make_distribution(Family::student_t, 2, 5.0, false);
  const auto small = level_set_2d(from_spec(spec), 2.0, 360);
  const auto large = level_set_2d(from_spec(spec), 4.0, 360);
  const auto i1 = level_set_1d(std_normal, 2.0), i2 = level_set_1d(std_normal, 4.0);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal(0.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const double x[2] = {normal(rng), normal(rng)};
    EXPECT_LE(gauge_eval(large, x), gauge_eval(small, x) * (1.0 + 1e-12));
    EXPECT_LE(gauge_eval(i2, std::span<const double>(x, 1)), gauge_eval(i1, std::span<const double>(x, 1)));
  }
}

TEST(Geometry, LevelSetJson) {
  const auto spec = make_distribution(Family::gaussian, 2, kLogConcave, false);
  const auto j = to_json(level_set_2d(from_spec(spec), 2.0, 8));
  ASSERT_EQ(j["rays"].size(), 8u);
  EXPECT_TRUE(j["rays"][0].contains("angle"));
  EXPECT_TRUE(j["rays"][0].contains("length"));
  EXPECT_EQ(j["alpha"], 2.0);
}

TEST(Geometry, RestrictionRatioIsAtLeastOne) {
  const auto spec = make_distribution(Family::pareto_1d, 1, 4.0, false);
  const auto res = restriction_check(spec, 1.0, FKind::linear_power, 1.0);
  EXPECT_TRUE(std::isfinite(res.ratio));
  EXPECT_GE(res.ratio, 1.0);
  EXPECT_TRUE(res.origin_inside);
  EXPECT_TRUE(res.doubling_ok);
}

TEST(Geometry, RestrictionPassesWithSmallBudgetOnGrid) {
  const auto tilted = make_borell_density_1d;
  for (double p : {1.0, 2.0}) {
    for (double r : {3.0, 4.0, 6.0, 10.0}) {
      const auto spec = make_distribution(Family::pareto_1d, 1, r, false);
      const auto asym = tilted([](double t) { return 1.0 + std::abs(t) + 0.5 * t; }, 1.0 + r, {0.0}, true);
      for (FKind kind : {FKind::linear_power, FKind::gauge_power}) {
        double passing = 0.0;
        for (double budget : {1.0, 2.0, 4.0, 8.0}) {
          const auto a = restriction_check(spec, p, kind, budget);
          const auto b = restriction_check(asym, r, p, kind, budget);
          EXPECT_TRUE(a.origin_inside && b.origin_inside);
          if (a.ratio <= a.bound && b.ratio <= b.bound) {
            passing = budget;
            break;
          }
        }
        EXPECT_GT(passing, 0.0) << "p=" << p << " r=" << r;
      }
    }
  }
}

TEST(Geometry, RestrictionRatioTendsToOne) {
  const auto spec = make_distribution(Family::pareto_1d, 1, 4.0, false);
  const auto res = restriction_check(spec, 1.0, FKind::linear_power, 1e4);
  EXPECT_LT(res.ratio - 1.0, 1e-4);
}

TEST(Geometry, PlanarRestriction) {
  const auto spec = make_distribution(Family::radial_pareto, 2, 6.0, false);
  const auto res = restriction_check(spec, 2.0, FKind::gauge_power, 2.0);
  EXPECT_TRUE(res.origin_inside);
  EXPECT_GE(res.ratio, 1.0);
  EXPECT_LE(res.ratio, res.bound);
}

TEST(Geometry, Concave2Instances) {
  const auto line = make_distribution(Family::pareto_1d, 1, 10.0, false);
  const auto one = concave2_check(line, 1.0, 2.0);
  EXPECT_TRUE(one.origin_inside);
  EXPECT_LE(one.ratio, 1.0);
  const auto plane = make_distribution(Family::student_t, 2, 6.0, false);
  const auto two = concave2_check(plane, 2.0, 2.0);
  EXPECT_TRUE(two.origin_inside);
  EXPECT_LE(two.ratio, 1.0);
  EXPECT_THROW(concave2_check(plane, 1.0, 2.0), HypothesisError);
}

TEST(Geometry, G0BoundOnTwentyCases) {
  for (const auto& c : convex_cases()) {
    for (double beta : {2.5, 3.0, 5.0, 10.0}) {
      const auto g = make_borell_density_1d(c.f, beta, c.kinks, true);
      const auto res = g0_bound_check(g);
      EXPECT_GE(res.margin, -1e-10) << c.name << " beta=" << beta;
      EXPECT_LE(std::abs(res.mean), 1e-6);
    }
  }
}

TEST(Geometry, G0BoundSymmetricMargin) {
  const auto g = make_borell_density_1d([](double t) { return 1.0 + std::abs(t); }, 5.0, {0.0}, true);
  const auto res = g0_bound_check(g);
  EXPECT_NEAR(res.g0, res.sup_norm, 1e-9);
  EXPECT_NEAR(res.margin, (1.0 - std::pow(3.0 / 4.0, 5.0)) * res.sup_norm, 1e-9);
  const auto raw = make_borell_density_1d([](double t) { return 1.0 + std::abs(t) + 0.5 * t; }, 5.0, {0.0}, false);
  EXPECT_THROW(g0_bound_check(raw), std::invalid_argument);
}

TEST(Geometry, G0FactorApproachesExpMinusOne) {
  EXPECT_NEAR(g0_factor(1000.0) / std::exp(-1.0), 1.0, 0.01);
  double prev = 0.0;
  for (double beta : {3.0, 10.0, 100.0, 1000.0}) {
    EXPECT_GT(g0_factor(beta), prev);
    prev = g0_factor(beta);
  }
}

TEST(Geometry, GFunctionIsConstantForExtremalPhi) {
  for (double s : {0.5, 1.0, 3.0}) {
    for (double m : {1.0, 2.0}) {
      const auto res = G_monotonicity_check([s](double x) { return x - s; }, s, m, {m + 1.5, m + 2.0, m + 4.0, m + 9.0});
      for (double v : res.values) EXPECT_NEAR(v, 1.0, 1e-9);
    }
  }
}

TEST(Geometry, GFunctionIncreasesForConcavePhi) {
  const auto sq = G_monotonicity_check([](double x) { return std::sqrt(x - 1.0); }, 1.0, 1.0, {3.0, 4.0, 5.0, 6.0});
  EXPECT_TRUE(sq.nondecreasing);
  for (std::size_t k = 1; k < sq.values.size(); ++k) EXPECT_GT(sq.values[k], sq.values[k - 1]);
  const auto capped = G_monotonicity_check([](double x) { return std::min(x - 1.0, 1.0); }, 1.0, 1.0, {2.5, 3.0, 4.0, 6.0});
  EXPECT_TRUE(capped.nondecreasing);
  EXPECT_THROW(G_monotonicity_check([](double x) { return (x - 1.0) * (x - 1.0); }, 1.0, 1.0, {3.0}),
               std::invalid_argument);
}

TEST(Geometry, PolarFormulaIsAnIdentity) {
  const auto g = polar_formula_check(make_distribution(Family::gaussian, 2, kLogConcave, false));
  EXPECT_NEAR(g.lhs, std::sqrt(2.0 / std::numbers::pi), 1e-9);
  EXPECT_LE(g.gap, 1e-8);
  EXPECT_LE(polar_formula_check(make_distribution(Family::student_t, 2, 5.0, false)).gap, 1e-6);
  EXPECT_LE(polar_formula_check(make_distribution(Family::radial_pareto, 2, 4.0, false)).gap, 1e-6);
  EXPECT_THROW(polar_formula_check(make_distribution(Family::gaussian, 3, kLogConcave, false)),
               std::invalid_argument);
}

TEST(Geometry, PolarLevelsetGaussianSegment) {
  const auto spec = make_distribution(Family::gaussian, 3, kLogConcave, true);
  const auto res = polar_levelset_check(spec, 2.0, 6.0, 1.0);
  EXPECT_NEAR(res.segment_length, 2.0, 1e-8);
  // Interval of the standard normal marginal at level alpha.
  EXPECT_NEAR(res.interval_length, 2.0 * std::sqrt(2.0 * std::log(res.alpha)), 1e-7);
  const auto doubled = polar_levelset_check(spec, 2.0, 6.0, 2.0);
  EXPECT_GE(doubled.interval_length, res.interval_length);
}

TEST(Geometry, PolarLevelsetGrid) {
  for (Family f : {Family::gaussian, Family::student_t, Family::radial_pareto}) {
    for (double p : {1.0, 2.0}) {
      for (double r : {4.0, 6.0, 10.0}) {
        const auto spec = make_distribution(f, 3, r, true);
        bool passed = false;
        for (double budget : {1.0, 2.0, 4.0, 8.0}) {
          const auto res = polar_levelset_check(spec, p, r, budget);
          EXPECT_TRUE(res.origin_inside);
          if (res.ratio <= 1.0) {
            passed = true;
            break;
          }
        }
        EXPECT_TRUE(passed) << to_string(f) << " p=" << p << " r=" << r;
      }
    }
  }
}
