#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numbers>

#include "convexmoments/constants.hpp"
#include "convexmoments/estimators.hpp"
#include "convexmoments/numerics.hpp"

using namespace convexmoments;

namespace {

void expect_covers(const MomentEstimate& e, double truth, double slack = 0.0) {
  EXPECT_LE(e.ci_low - slack, truth) << "value " << e.value;
  EXPECT_GE(e.ci_high + slack, truth) << "value " << e.value;
}

void expect_ordered(const MomentEstimate& e) {
  EXPECT_LE(e.ci_low, e.value);
  EXPECT_LE(e.value, e.ci_high);
}

SampleBatch draw(Family f, int n, double r, std::size_t count, std::uint64_t seed = 11, bool iso = false) {
  return sample(make_distribution(f, n, r, iso), seed, count);
}

}  // namespace

TEST(Estimators, StrongMomentGaussian) {
  const auto batch = draw(Family::gaussian, 16, kLogConcave, 1'000'000);
  const auto two = strong_moment(batch, 2.0);
  EXPECT_NEAR(two.value, 4.0, 0.01);
  expect_ordered(two);
  EXPECT_EQ(two.method, EstimateMethod::median_of_means);
  // E chi_16^4 = 16 * 18.
  const auto four = strong_moment(batch, 4.0);
  expect_covers(four, std::pow(288.0, 0.25));
  EXPECT_NEAR(four.value, 4.1195, 0.01);
}

TEST(Estimators, StrongMomentParetoBetaOracle) {
  const auto batch = draw(Family::radial_pareto, 2, 6.0, 400'000);
  const auto e = strong_moment(batch, 1.0);
  expect_covers(e, 0.4);
}

TEST(Estimators, StrongMomentRejectsInfiniteVariance) {
  const auto batch = draw(Family::radial_pareto, 2, 6.0, 20'000);
  EXPECT_THROW(strong_moment(batch, 2.6), HypothesisError);
  EXPECT_THROW(strong_moment(draw(Family::gaussian, 2, kLogConcave, 100), 1.0), std::invalid_argument);
}

TEST(Estimators, WeakMomentOracles) {
  for (int n : {1, 3, 10}) {
    for (double p : {1.0, 2.5, 7.0}) {
      const auto e = weak_moment_oracle(make_distribution(Family::gaussian, n, kLogConcave, false), p);
      EXPECT_NEAR(e.value, constants::gamma_p(p), 1e-11);
      EXPECT_EQ(e.ci_low, e.value);
      EXPECT_EQ(e.ci_high, e.value);
    }
  }
  EXPECT_NEAR(weak_moment_oracle(make_distribution(Family::student_t, 4, 8.0, true), 2.0).value, 1.0, 1e-12);
  EXPECT_NEAR(weak_moment_oracle(make_distribution(Family::radial_pareto, 2, 6.0, false), 1.0).value,
              0.4 * 2.0 / std::numbers::pi, 1e-12);
  EXPECT_THROW(weak_moment_oracle(make_distribution(Family::student_t, 4, 8.0, true), 8.0), HypothesisError);
}

TEST(Estimators, SphereCoordinateMoment) {
  EXPECT_NEAR(sphere_coordinate_moment(3, 2.0), 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(sphere_coordinate_moment(2, 1.0), 2.0 / std::numbers::pi, 1e-14);
  EXPECT_NEAR(sphere_coordinate_moment(1, 3.0), 1.0, 1e-14);
}

TEST(Estimators, WeakMomentSearchFindsLaplaceAxis) {
  // Product Laplace: E<z,X>^4 = 12 + 12 sum z_i^4, maximal on the axes.
  const auto batch = draw(Family::laplace_product, 4, kLogConcave, 200'000);
  const auto e = weak_moment(batch, 4.0);
  EXPECT_TRUE(e.lower_bound);
  expect_covers(e, std::pow(24.0, 0.25), 0.01);
  const auto iso = draw(Family::laplace_product, 3, kLogConcave, 200'000, 3, true);
  EXPECT_NEAR(weak_moment(iso, 2.0).value, 1.0, 0.02);
}

TEST(Estimators, NegativeMomentExamples) {
  // gaussian n = 2, p = 1 is excluded by the hypothesis p < n/2; its value is
  // still available from the radial oracle.
  const auto g2 = make_distribution(Family::gaussian, 2, kLogConcave, false);
  EXPECT_NEAR(1.0 / radial_moment_oracle(g2, -1.0), 0.7979, 1e-4);
  EXPECT_THROW(negative_moment(sample(g2, 1, 100'000), 1.0), HypothesisError);

  const auto g16 = draw(Family::gaussian, 16, kLogConcave, 200'000);
  const auto neg = negative_moment(g16, 1.0);
  EXPECT_EQ(neg.method, EstimateMethod::plain_mean);
  expect_covers(neg, 1.0 / radial_moment_oracle(g16.spec(), -1.0));
  EXPECT_LT(neg.value, strong_moment(g16, 1.0).value);

  // Uniform ball in R^4: E|X|^{-1} = n/(n-1).
  const auto ball = draw(Family::uniform_ball, 4, kLogConcave, 200'000);
  const double truth = 0.75;
  const auto quad = numerics::integrate([](double t) { return 4.0 * t * t; }, 0.0, 1.0);
  EXPECT_NEAR(1.0 / quad, truth, 1e-12);
  expect_covers(negative_moment(ball, 1.0), truth);
}

TEST(Estimators, MedianExamples) {
  const auto g1 = draw(Family::gaussian, 1, kLogConcave, 100'000);
  const auto med = median_norm(g1);
  expect_covers(med, boost::math::quantile(boost::math::normal(), 0.75));
  EXPECT_NEAR(med.value, 0.6745, 0.01);

  const auto p1 = draw(Family::pareto_1d, 1, 3.0, 100'000);
  expect_covers(median_norm(p1), std::cbrt(2.0) - 1.0);

  // Every row at radius 2.5.
  const auto unit = make_distribution(Family::gaussian, 2, kLogConcave, false);
  std::vector<double> rows;
  for (int i = 0; i < 2000; ++i) {
    const double th = 0.01 * i;
    rows.push_back(2.5 * std::cos(th));
    rows.push_back(2.5 * std::sin(th));
  }
  EXPECT_NEAR(median_norm(SampleBatch::from_rows(unit, rows)).value, 2.5, 1e-12);
}

TEST(Estimators, TailExamples) {
  const auto g1 = draw(Family::gaussian, 1, kLogConcave, 200'000);
  EXPECT_EQ(tail_probability(g1, 0.0).value, 1.0);
  const auto tail = tail_probability(g1, 1.96);
  expect_covers(tail, 2.0 * boost::math::cdf(boost::math::complement(boost::math::normal(), 1.96)));
  expect_ordered(tail);

  const auto t4 = draw(Family::student_t, 1, 4.0, 400'000);
  const boost::math::students_t law(4.0);
  std::vector<double> xs, ys, oracle;
  for (double t : {2.0, 3.0, 4.0, 6.0, 8.0}) {
    const double truth = 2.0 * boost::math::cdf(boost::math::complement(law, t));
    expect_covers(tail_probability(t4, t), truth);
    xs.push_back(std::log(t));
    ys.push_back(std::log(tail_probability(t4, t).value));
    oracle.push_back(std::log(truth));
  }
  EXPECT_NEAR(numerics::least_squares(xs, ys).slope, numerics::least_squares(xs, oracle).slope, 0.1);
  const double far = 2.0 * boost::math::cdf(boost::math::complement(law, 1e3));
  const double farther = 2.0 * boost::math::cdf(boost::math::complement(law, 2e3));
  EXPECT_NEAR(std::log(farther / far) / std::log(2.0), -4.0, 1e-3);
}

TEST(Estimators, SmallBallExamples) {
  const auto g2 = draw(Family::gaussian, 2, kLogConcave, 400'000);
  const double mean = std::sqrt(std::numbers::pi / 2.0);
  EXPECT_NEAR(small_ball_location(g2.spec(), 1), mean, 1e-12);
  EXPECT_EQ(small_ball_probability(g2, 0.0, mean).value, 0.0);
  const auto near_one = small_ball_probability(g2, 1.0, mean);
  expect_covers(near_one, 1.0 - std::exp(-mean * mean / 2.0));
  EXPECT_NEAR(near_one.value, 0.544, 0.003);
  const auto small = small_ball_probability(g2, 0.1, mean);
  const double exact = 1.0 - std::exp(-std::pow(0.1 * mean, 2) / 2.0);
  EXPECT_NEAR(exact, 0.00782, 1e-5);
  expect_covers(small, exact);
}

TEST(Estimators, CovarianceMatchesEigen) {
  const auto batch = draw(Family::student_t, 6, 12.0, 5'000, 4, true);
  Eigen::MatrixXd x = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      batch.data().data(), static_cast<Eigen::Index>(batch.count()), 6);
  const Eigen::MatrixXd dev = x.transpose() * x / static_cast<double>(batch.count()) - Eigen::MatrixXd::Identity(6, 6);
  const double truth = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(dev).eigenvalues().cwiseAbs().maxCoeff();
  EXPECT_NEAR(covariance_deviation(batch), truth, 1e-5 * std::max(1.0, truth));
}

TEST(Estimators, CovarianceExactIdentityAndRejection) {
  const int n = 5;
  const auto spec = make_distribution(Family::gaussian, n, kLogConcave, true);
  std::vector<double> rows(n * n, 0.0);
  for (int i = 0; i < n; ++i) rows[i * n + i] = std::sqrt(static_cast<double>(n));
  EXPECT_NEAR(covariance_deviation(SampleBatch::from_rows(spec, rows)), 0.0, 1e-12);
  EXPECT_THROW(covariance_deviation(draw(Family::radial_pareto, 3, 6.0, 100)), HypothesisError);
}

TEST(Estimators, CovarianceRateForGaussian) {
  const int n = 16;
  const std::size_t N = 16 * 256;
  std::vector<double> c;
  for (std::uint64_t s = 0; s < 20; ++s) {
    c.push_back(covariance_deviation(draw(Family::gaussian, n, kLogConcave, N, 100 + s, true)) /
                std::sqrt(static_cast<double>(n) / N));
  }
  const double fitted = numerics::median(c);
  EXPECT_GE(fitted, 0.5);
  EXPECT_LE(fitted, 4.0);
}

TEST(Estimators, LyapunovHolderAndDominance) {
  const auto batch = draw(Family::student_t, 5, 20.0, 200'000, 8);
  double prev = 0.0;
  const double first = strong_moment(batch, 1.0).value;
  for (double p = 0.5; p <= 9.5; p += 0.5) {
    const double v = strong_moment(batch, p).value;
    EXPECT_GE(v, prev) << p;
    if (p >= 1.0) EXPECT_GE(v, first);
    prev = v;
  }
  for (double p : {1.0, 3.0, 6.0}) {
    EXPECT_LE(weak_moment_oracle(batch.spec(), p).value, std::pow(radial_moment_oracle(batch.spec(), p), 1.0 / p));
  }
  EXPECT_LE(negative_moment(batch, 1.0).value, first);
}

TEST(Estimators, Determinism) {
  const auto a = draw(Family::student_t, 3, 9.0, 50'000, 77);
  const auto b = draw(Family::student_t, 3, 9.0, 50'000, 77);
  EXPECT_EQ(strong_moment(a, 2.0).value, strong_moment(b, 2.0).value);
  EXPECT_EQ(weak_moment(a, 2.0).value, weak_moment(b, 2.0).value);
  EXPECT_EQ(median_norm(a).ci_high, median_norm(b).ci_high);
}

TEST(Estimators, JsonShape) {
  const auto j = to_json(strong_moment(draw(Family::gaussian, 2, kLogConcave, 10'000), 2.0));
  EXPECT_EQ(j["method"], "median_of_means");
  EXPECT_EQ(j["n"], 10'000);
  EXPECT_EQ(j["p"], 2.0);
  ASSERT_EQ(j["ci"].size(), 2u);
  EXPECT_LE(j["ci"][0].get<double>(), j["value"].get<double>());
}
