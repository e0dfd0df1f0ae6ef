#include "convexmoments/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "convexmoments/numerics.hpp"
#include "convexmoments/rng.hpp"

namespace convexmoments {

namespace {

using numerics::kZ95;

// Median of the per-block roots (mean v^p)^{1/p}. Each block root is
// nondecreasing in p, and so is every order statistic of them.
MomentEstimate median_of_means_root(std::span<const double> values, double p) {
  const std::size_t n = values.size();
  if (n < static_cast<std::size_t>(kMomBlocks)) {
    throw std::invalid_argument("median of means needs at least one row per block");
  }
  std::vector<double> roots(kMomBlocks);
  for (int b = 0; b < kMomBlocks; ++b) {
    const std::size_t lo = n * b / kMomBlocks;
    const std::size_t hi = n * (b + 1) / kMomBlocks;
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) sum += std::pow(values[i], p);
    roots[b] = std::pow(sum / static_cast<double>(hi - lo), 1.0 / p);
  }
  double mean = 0.0;
  for (double v : roots) mean += v;
  mean /= kMomBlocks;
  double var = 0.0;
  for (double v : roots) var += (v - mean) * (v - mean);
  var /= kMomBlocks - 1;

  MomentEstimate e;
  e.value = numerics::median(roots);
  // Asymptotic efficiency of the median relative to the mean is 2/pi.
  e.std_error = std::sqrt(0.5 * std::numbers::pi * var / kMomBlocks);
  e.ci_low = std::max(0.0, e.value - kZ95 * e.std_error);
  e.ci_high = e.value + kZ95 * e.std_error;
  e.method = EstimateMethod::median_of_means;
  e.n_samples = n;
  e.p = p;
  return e;
}

MomentEstimate proportion(std::size_t hits, std::size_t trials, double p) {
  MomentEstimate e;
  e.value = trials == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(trials);
  const auto ci = numerics::wilson_interval(hits, trials);
  e.ci_low = std::min(ci.low, e.value);
  e.ci_high = std::max(ci.high, e.value);
  e.std_error = trials == 0 ? 0.0 : std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(trials));
  e.method = EstimateMethod::plain_mean;
  e.n_samples = trials;
  e.p = p;
  return e;
}

void normalize(std::vector<double>& z) {
  double s = 0.0;
  for (double v : z) s += v * v;
  s = std::sqrt(s);
  if (s > 0.0) {
    for (double& v : z) v /= s;
  }
}

double projected_power_mean(const SampleBatch& batch, std::size_t rows, const std::vector<double>& z,
                            double p) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    const auto x = batch.row(i);
    double t = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) t += z[k] * x[k];
    sum += std::pow(std::abs(t), p);
  }
  return sum / static_cast<double>(rows);
}

}  // namespace

std::string_view to_string(EstimateMethod method) {
  switch (method) {
    case EstimateMethod::median_of_means: return "median_of_means";
    case EstimateMethod::plain_mean: return "plain_mean";
    case EstimateMethod::empirical_quantile: return "empirical_quantile";
    case EstimateMethod::oracle: return "oracle";
  }
  return "unknown";
}

nlohmann::json to_json(const MomentEstimate& e) {
  nlohmann::json j;
  j["value"] = e.value;
  j["ci"] = {e.ci_low, e.ci_high};
  j["se"] = e.std_error;
  j["method"] = std::string(to_string(e.method));
  j["n"] = e.n_samples;
  j["p"] = e.p;
  if (e.lower_bound) j["lower_bound"] = true;
  return j;
}

double finite_variance_limit(const DistributionSpec& spec) {
  if (std::isinf(spec.r())) return std::numeric_limits<double>::infinity();
  return 0.5 * spec.r() - 0.5;
}

MomentEstimate strong_moment(const SampleBatch& batch, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("strong moment requires p > 0");
  if (p > finite_variance_limit(batch.spec())) {
    throw HypothesisError("strong moment estimate requires p <= r/2 - 0.5 (finite variance of |X|^p)");
  }
  if (batch.count() < kMinStrongSamples) {
    throw std::invalid_argument("strong moment estimate requires at least 1e4 draws");
  }
  return median_of_means_root(batch.norms(), p);
}

MomentEstimate directional_moment(const SampleBatch& batch, std::span<const double> z, double p) {
  if (z.size() != static_cast<std::size_t>(batch.dim())) {
    throw std::invalid_argument("direction dimension mismatch");
  }
  if (!(p > 0.0)) throw std::invalid_argument("directional moment requires p > 0");
  std::vector<double> proj(batch.count());
  for (std::size_t i = 0; i < batch.count(); ++i) {
    const auto x = batch.row(i);
    double t = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) t += z[k] * x[k];
    proj[i] = std::abs(t);
  }
  return median_of_means_root(proj, p);
}

double sphere_coordinate_moment(int dim, double p) {
  if (dim == 1) return 1.0;
  const double h = 0.5 * (dim - 1);
  return std::exp(numerics::log_beta(0.5 * (p + 1.0), h) - numerics::log_beta(0.5, h));
}

MomentEstimate weak_moment_oracle(const DistributionSpec& spec, double p) {
  if (!spec.radial()) throw std::invalid_argument("weak moment oracle requires a radial family");
  if (!(p > 0.0)) throw std::invalid_argument("weak moment requires p > 0");
  if (std::isfinite(spec.r()) && !(p < spec.r())) throw HypothesisError("weak moment requires p < r");
  MomentEstimate e;
  e.value = std::pow(radial_moment_oracle(spec, p) * sphere_coordinate_moment(spec.dim(), p), 1.0 / p);
  e.ci_low = e.ci_high = e.value;
  e.method = EstimateMethod::oracle;
  e.p = p;
  return e;
}

MomentEstimate weak_moment(const SampleBatch& batch, double p, const DirectionSearch& search) {
  const auto& spec = batch.spec();
  if (std::isfinite(spec.r()) && !(p < spec.r())) throw HypothesisError("weak moment requires p < r");
  if (spec.radial()) return weak_moment_oracle(spec, p);
  if (!(p >= 1.0)) throw std::invalid_argument("direction search requires p >= 1");

  const std::size_t n = static_cast<std::size_t>(batch.dim());
  const std::size_t rows = std::min(search.search_rows, batch.count() / 2);
  if (rows < 2 * static_cast<std::size_t>(kMomBlocks)) {
    throw std::invalid_argument("weak moment search needs a larger batch");
  }
  Engine engine(derive_seed(search.seed, batch.seed()));
  std::normal_distribution<double> normal(0.0, 1.0);

  struct Candidate {
    double score;
    std::vector<double> z;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(search.starts + n);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> z(n, 0.0);
    z[k] = 1.0;
    candidates.push_back({projected_power_mean(batch, rows, z, p), std::move(z)});
  }
  for (int s = 0; s < search.starts; ++s) {
    std::vector<double> z(n);
    for (auto& v : z) v = normal(engine);
    normalize(z);
    candidates.push_back({projected_power_mean(batch, rows, z, p), std::move(z)});
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
  candidates.resize(std::min<std::size_t>(candidates.size(), 8));

  // Phi(z) = mean |<z,x>|^p is convex and p-homogeneous, so moving to the
  // normalized gradient never decreases it on the sphere.
  std::vector<double> grad(n);
  for (auto& c : candidates) {
    for (int step = 0; step < search.ascent_steps; ++step) {
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t i = 0; i < rows; ++i) {
        const auto x = batch.row(i);
        double t = 0.0;
        for (std::size_t k = 0; k < n; ++k) t += c.z[k] * x[k];
        const double w = std::copysign(std::pow(std::abs(t), p - 1.0), t);
        for (std::size_t k = 0; k < n; ++k) grad[k] += w * x[k];
      }
      std::vector<double> next = grad;
      normalize(next);
      const double score = projected_power_mean(batch, rows, next, p);
      if (!(score > c.score)) break;
      c.score = score;
      c.z = std::move(next);
    }
  }
  const auto best = std::max_element(candidates.begin(), candidates.end(),
                                     [](const Candidate& a, const Candidate& b) { return a.score < b.score; });

  std::vector<double> held_out;
  held_out.reserve(batch.count() - rows);
  for (std::size_t i = rows; i < batch.count(); ++i) {
    const auto x = batch.row(i);
    double t = 0.0;
    for (std::size_t k = 0; k < n; ++k) t += best->z[k] * x[k];
    held_out.push_back(std::abs(t));
  }
  auto e = median_of_means_root(held_out, p);
  e.lower_bound = true;
  return e;
}

MomentEstimate negative_moment(const SampleBatch& batch, double p) {
  const int n = batch.dim();
  if (!(p > 0.0) || !(p < 0.5 * n)) {
    throw HypothesisError("negative moment requires 0 < p < n/2 (outside hypothesis p < min{r, n/2})");
  }
  if (batch.count() < kMinNegativeSamples) {
    throw std::invalid_argument("negative moment estimate requires at least 1e5 draws");
  }
  const auto& norms = batch.norms();
  const std::size_t count = norms.size();
  std::vector<double> means(kMomBlocks);
  double total = 0.0;
  for (int b = 0; b < kMomBlocks; ++b) {
    const std::size_t lo = count * b / kMomBlocks;
    const std::size_t hi = count * (b + 1) / kMomBlocks;
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) sum += std::pow(norms[i], -p);
    total += sum;
    means[b] = sum / static_cast<double>(hi - lo);
  }
  const double mean = total / static_cast<double>(count);
  double var = 0.0;
  for (double m : means) var += (m - mean) * (m - mean);
  var /= kMomBlocks - 1;
  const double se = std::sqrt(var / kMomBlocks);

  MomentEstimate e;
  e.value = std::pow(mean, -1.0 / p);
  e.ci_low = std::pow(mean + kZ95 * se, -1.0 / p);
  e.ci_high = mean - kZ95 * se > 0.0 ? std::pow(mean - kZ95 * se, -1.0 / p)
                                     : std::numeric_limits<double>::infinity();
  e.std_error = e.value * se / (p * mean);
  e.method = EstimateMethod::plain_mean;
  e.n_samples = count;
  e.p = -p;
  return e;
}

MomentEstimate median_norm(const SampleBatch& batch) {
  if (batch.count() < kMinMedianSamples) {
    throw std::invalid_argument("median estimate requires at least 1e3 draws");
  }
  std::vector<double> sorted = batch.norms();
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  const double half_width = kZ95 * 0.5 * std::sqrt(n);
  const auto idx = [&](double k) {
    return static_cast<std::size_t>(std::clamp(k, 0.0, n - 1.0));
  };
  MomentEstimate e;
  e.value = numerics::median(sorted);
  e.ci_low = std::min(e.value, sorted[idx(std::floor(0.5 * n - half_width))]);
  e.ci_high = std::max(e.value, sorted[idx(std::ceil(0.5 * n + half_width))]);
  e.std_error = (e.ci_high - e.ci_low) / (2.0 * kZ95);
  e.method = EstimateMethod::empirical_quantile;
  e.n_samples = sorted.size();
  e.p = 0.0;
  return e;
}

MomentEstimate tail_probability(std::span<const double> values, double threshold) {
  std::size_t hits = 0;
  for (double v : values) {
    if (v >= threshold) ++hits;
  }
  return proportion(hits, values.size(), 0.0);
}

MomentEstimate tail_probability(const SampleBatch& batch, double threshold) {
  if (threshold < 0.0) throw std::invalid_argument("tail threshold must be nonnegative");
  return tail_probability(batch.norms(), threshold);
}

MomentEstimate small_ball_probability(const SampleBatch& batch, double eps, double location) {
  if (eps < 0.0) throw std::invalid_argument("small-ball radius must be nonnegative");
  std::size_t hits = 0;
  if (eps > 0.0) {
    const double radius = eps * location;
    for (double v : batch.norms()) {
      if (v <= radius) ++hits;
    }
  }
  return proportion(hits, batch.count(), 0.0);
}

double small_ball_location(const DistributionSpec& spec, std::uint64_t seed) {
  if (spec.radial() || spec.dim() == 1) return radial_moment_oracle(spec, 1.0);
  const auto calibration = sample(spec, derive_seed(seed, 0xca11b8a7eULL), 100'000);
  double sum = 0.0;
  for (double v : calibration.norms()) sum += v;
  return sum / static_cast<double>(calibration.count());
}

double covariance_deviation(const SampleBatch& batch, std::uint64_t seed) {
  if (!batch.spec().isotropic()) {
    throw HypothesisError("covariance deviation requires an isotropic spec (r > 2)");
  }
  const std::size_t n = static_cast<std::size_t>(batch.dim());
  const std::size_t count = batch.count();
  if (count < n) throw std::invalid_argument("covariance deviation requires N >= n");

  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    const auto x = batch.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double xj = x[j];
      for (std::size_t k = j; k < n; ++k) a[j * n + k] += xj * x[k];
    }
  }
  const double inv = 1.0 / static_cast<double>(count);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j; k < n; ++k) {
      a[j * n + k] *= inv;
      a[k * n + j] = a[j * n + k];
    }
    a[j * n + j] -= 1.0;
  }

  Engine engine(derive_seed(seed, 0xc0fULL));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(n), w(n);
  double best = 0.0;
  for (int restart = 0; restart < 2; ++restart) {
    for (auto& x : v) x = normal(engine);
    normalize(v);
    double norm_av = 0.0;
    for (int it = 0; it < 200; ++it) {
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += a[j * n + k] * v[k];
        w[j] = s;
      }
      double nw = 0.0;
      for (double x : w) nw += x * x;
      nw = std::sqrt(nw);
      if (nw == 0.0) break;
      for (std::size_t j = 0; j < n; ++j) v[j] = w[j] / nw;
      const bool converged = std::abs(nw - norm_av) <= 1e-6 * nw;
      norm_av = nw;
      if (converged) break;
    }
    best = std::max(best, norm_av);
  }
  return best;
}

}  // namespace convexmoments
