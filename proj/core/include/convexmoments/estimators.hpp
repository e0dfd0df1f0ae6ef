#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include <nlohmann/json.hpp>

#include "convexmoments/distributions.hpp"

namespace convexmoments {

enum class EstimateMethod { median_of_means, plain_mean, empirical_quantile, oracle };

std::string_view to_string(EstimateMethod method);

struct MomentEstimate {
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  /// Standard error on the scale of `value` (0 for oracles).
  double std_error = 0.0;
  EstimateMethod method = EstimateMethod::oracle;
  std::size_t n_samples = 0;
  double p = 0.0;
  /// Set when the value is a supremum over finitely many directions and
  /// therefore only a lower bound for the true quantity.
  bool lower_bound = false;
};

nlohmann::json to_json(const MomentEstimate& e);

inline constexpr int kMomBlocks = 32;
inline constexpr std::size_t kMinStrongSamples = 10'000;
inline constexpr std::size_t kMinNegativeSamples = 100'000;
inline constexpr std::size_t kMinMedianSamples = 1'000;

/// Largest p for which |X|^p has finite variance: r/2 - 0.5 (infinite for
/// log-concave families).
double finite_variance_limit(const DistributionSpec& spec);

/// (E|X|^p)^{1/p}: the median over kMomBlocks contiguous blocks of the block
/// estimates (mean |X|^p)^{1/p}. Requires 0 < p <= r/2 - 0.5.
MomentEstimate strong_moment(const SampleBatch& batch, double p);

/// (E|<z, X>|^p)^{1/p} along a fixed unit direction, by median of means.
MomentEstimate directional_moment(const SampleBatch& batch, std::span<const double> z, double p);

/// Exact sigma_p for radial families: E|X|^p E|u_1|^p with u uniform on the sphere.
MomentEstimate weak_moment_oracle(const DistributionSpec& spec, double p);

/// E|u_1|^p for u uniform on S^{n-1}.
double sphere_coordinate_moment(int dim, double p);

struct DirectionSearch {
  int starts = 512;
  int ascent_steps = 50;
  std::size_t search_rows = 16384;
  std::uint64_t seed = 0x5eed;
};

/// sigma_p. Radial specs use the oracle; otherwise a seeded direction search
/// on part of the batch followed by a median-of-means evaluation of the best
/// direction on the remaining rows (a lower bound, flagged as such).
MomentEstimate weak_moment(const SampleBatch& batch, double p, const DirectionSearch& search = {});

/// (mean |X|^{-p})^{-1/p} with a 32-batch interval. Requires 0 < p < n/2.
MomentEstimate negative_moment(const SampleBatch& batch, double p);

/// Empirical median of |X| with an order-statistic interval.
MomentEstimate median_norm(const SampleBatch& batch);

/// Fraction of draws with |X| >= threshold, Wilson interval.
MomentEstimate tail_probability(const SampleBatch& batch, double threshold);

/// Same as tail_probability on precomputed values.
MomentEstimate tail_probability(std::span<const double> values, double threshold);

/// Fraction with |X| <= eps * location, Wilson interval.
MomentEstimate small_ball_probability(const SampleBatch& batch, double eps, double location);

/// Location for small-ball probabilities: the oracle E|X| when available,
/// otherwise the mean norm of an independent calibration batch of 1e5 draws.
double small_ball_location(const DistributionSpec& spec, std::uint64_t seed);

/// Operator norm of (1/N) sum X_i X_i^T - I by symmetric power iteration.
double covariance_deviation(const SampleBatch& batch, std::uint64_t seed = 1);

}  // namespace convexmoments
