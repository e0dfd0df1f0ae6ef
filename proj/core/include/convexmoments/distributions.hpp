#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "convexmoments/errors.hpp"

namespace convexmoments {

/// Concrete families with a known concavity parameter.
///
///  gaussian         N(0, s^2 I), log-concave
///  radial_pareto    density ~ (1 + |x|/s)^-(n+r), (-1/r)-concave
///  student_t        density ~ (1 + |x|^2/(nu s^2))^-(nu+n)/2 with nu = r
///  laplace_product  i.i.d. Laplace(0, s) coordinates, log-concave, not radial
///  uniform_ball     uniform on the ball of radius s, log-concave
///  pareto_1d        radial_pareto restricted to n = 1 (closed CDF)
enum class Family { gaussian, radial_pareto, student_t, laplace_product, uniform_ball, pareto_1d };

std::string_view to_string(Family family);
Family parse_family(std::string_view name);

/// Sentinel concavity parameter of the log-concave families.
inline constexpr double kLogConcave = std::numeric_limits<double>::infinity();

namespace detail {
struct RadialSampler;
}

/// A validated member of one of the families. Construction precomputes the
/// normalizer and, for the Pareto families, the radial inverse-CDF table; the
/// spec is immutable afterwards and safe to share between threads.
class DistributionSpec {
 public:
  Family family() const noexcept { return family_; }
  int dim() const noexcept { return dim_; }
  /// Concavity parameter r (kappa = -1/r); kLogConcave for log-concave families.
  double r() const noexcept { return r_; }
  double scale() const noexcept { return scale_; }
  bool centered() const noexcept { return true; }
  bool log_concave() const noexcept;
  /// Density depends on |x| only.
  bool radial() const noexcept;
  /// Identity covariance (scale equals the isotropic scale of the family).
  bool isotropic() const noexcept;
  /// log of the constant Z in g(x) = h(x) / Z.
  double log_normalizer() const noexcept { return log_normalizer_; }

  const detail::RadialSampler* radial_sampler() const noexcept { return sampler_.get(); }

 private:
  friend DistributionSpec make_distribution_with_scale(Family, int, double, double);

  Family family_ = Family::gaussian;
  int dim_ = 1;
  double r_ = kLogConcave;
  double scale_ = 1.0;
  double log_normalizer_ = 0.0;
  std::shared_ptr<const detail::RadialSampler> sampler_;
};

/// Builds a spec. Log-concave families ignore `r`. With `normalize` set the
/// scale is chosen analytically so that the covariance is the identity.
DistributionSpec make_distribution(Family family, int dim, double r, bool normalize);

/// Builds a spec with an explicit scale.
DistributionSpec make_distribution_with_scale(Family family, int dim, double r, double scale);

/// Scale giving identity covariance; requires r > 2 for the heavy-tailed families.
double isotropic_scale(Family family, int dim, double r);

/// {family, dim, r, scale}; r is the string "inf" for log-concave families.
nlohmann::json to_json(const DistributionSpec& spec);
DistributionSpec spec_from_json(const nlohmann::json& j);

/// Natural log of the normalized density at x (-inf outside the support).
double density_log(const DistributionSpec& spec, std::span<const double> x);

/// log g(x) for |x| = radius. Radial families only.
double log_radial_profile(const DistributionSpec& spec, double radius);

/// Density of |X| at radius. Radial families only.
double radial_density(const DistributionSpec& spec, double radius);

/// P(|X| <= radius) from the closed form of each family.
double radial_cdf(const DistributionSpec& spec, double radius);

/// Exact E|X|^p from the Beta/Gamma closed forms. Requires -n < p and, for
/// finite r, p < r.
double radial_moment_oracle(const DistributionSpec& spec, double p);

/// E|X|^p by adaptive quadrature of the radial density (radial families).
double radial_moment_quadrature(const DistributionSpec& spec, double p, double rel_tol = 1e-10);

/// Density of the orthogonal projection onto an m-dimensional subspace at a
/// point u of that subspace (m in {1, 2}, m < n). By rotation invariance the
/// subspace is irrelevant; the value depends on |u| only.
double marginal_density(const DistributionSpec& spec, int m, std::span<const double> u);
double marginal_density_at_radius(const DistributionSpec& spec, int m, double radius);

struct ConcavityParams {
  double kappa = 0.0;
  double r = kLogConcave;
  /// beta = n + r in g = f^-beta; absent for log-concave families.
  std::optional<double> beta;
};

ConcavityParams concavity_params(const DistributionSpec& spec);

struct LineGrid {
  int lines = 64;
  int points_per_line = 257;
  /// Half-length of each line; 0 picks a multiple of the typical radius.
  double half_width = 0.0;
  std::uint64_t seed = 1;
};

struct ConvexityViolation {
  std::vector<double> point;
  std::vector<double> direction;
  double step = 0.0;
  double second_difference = 0.0;
  double local_scale = 0.0;
};

struct BorellCertificate {
  bool pass = false;
  double claimed_r = 0.0;
  std::size_t triples_checked = 0;
  std::optional<ConvexityViolation> first_violation;
};

/// Checks that x -> g(x)^{-1/(n+r)} has nonnegative second differences
/// (>= -1e-9 times the local value) along random lines. `claimed_r` defaults
/// to the family's r and must be finite.
BorellCertificate borell_convexity_check(const DistributionSpec& spec, const LineGrid& grid = {},
                                         std::optional<double> claimed_r = std::nullopt);

struct ChunkInfo {
  std::uint64_t sub_seed = 0;
  std::size_t size = 0;
};

inline constexpr std::size_t kDefaultChunkSize = std::size_t{1} << 16;

/// Chunk layout derived from the master seed: chunk i gets derive_seed(seed, i).
std::vector<ChunkInfo> default_chunk_layout(std::uint64_t seed, std::size_t count,
                                            std::size_t chunk_size = kDefaultChunkSize);

/// N x n row-major draws together with the information needed to regenerate them.
class SampleBatch {
 public:
  SampleBatch(DistributionSpec spec, std::uint64_t seed, std::vector<ChunkInfo> layout,
              std::vector<double> data);

  /// Wraps explicit rows (test doubles, externally produced data).
  static SampleBatch from_rows(DistributionSpec spec, std::vector<double> rows);

  const DistributionSpec& spec() const noexcept { return spec_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t count() const noexcept { return count_; }
  int dim() const noexcept { return spec_.dim(); }
  const std::vector<ChunkInfo>& chunk_layout() const noexcept { return layout_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<const double> row(std::size_t i) const;
  /// Euclidean norms |X_i|, computed once.
  const std::vector<double>& norms() const noexcept { return norms_; }

 private:
  DistributionSpec spec_;
  std::uint64_t seed_ = 0;
  std::size_t count_ = 0;
  std::vector<ChunkInfo> layout_;
  std::vector<double> data_;
  std::vector<double> norms_;
};

/// i.i.d. draws; chunks are generated independently (in parallel when allowed)
/// and concatenated in layout order.
SampleBatch sample(const DistributionSpec& spec, std::uint64_t seed, std::size_t count);
SampleBatch sample(const DistributionSpec& spec, std::uint64_t seed,
                   const std::vector<ChunkInfo>& layout);

}  // namespace convexmoments
