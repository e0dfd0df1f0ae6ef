#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "convexmoments/distributions.hpp"
#include "convexmoments/report.hpp"

/// Inequality checks. Each returns a finalized CheckReport whose budgets
/// stand in for the unnamed universal constants. Estimates are compared at
/// the unfavorable ends of their 95% intervals; hypothesis violations throw
/// HypothesisError.
namespace convexmoments::verify {

/// Budget grid swept by the quadrature lemmas; the smallest passing entry is
/// reported.
inline const std::vector<double> kBudgetSweep = {1.0, 2.0, 4.0, 8.0};

/// Samples are capped so that N * n stays below this many doubles.
inline constexpr std::size_t kMaxBatchDoubles = 16'000'000;
std::size_t capped_samples(std::size_t requested, int dim);

/// (E|X|^p)^{1/p} <= budget (c2 E|X| + sigma_p), with c2 = 1 for log-concave
/// specs unless a finite r is claimed for them. Also checks the reverse floor
/// 2 (E|X|^p)^{1/p} >= E|X| + sigma_p.
CheckReport strong_weak(const DistributionSpec& spec, double p, std::size_t n_samples, std::uint64_t seed,
                        double budget, std::optional<double> claimed_r = std::nullopt);

/// strong_weak over a dimension grid, plus the cross-n spread (max/min <= 3)
/// and log-n slope (<= 0.1) of the ratios. r defaults to 2(p + 1); a
/// log-concave family uses c2 = 1 unless r is given.
CheckReport universality(Family family, double p, std::optional<double> r, const std::vector<int>& dims,
                         std::size_t n_samples, std::uint64_t seed, double budget);

/// Assumption H(p, lambda) for a rank-m image of a radial vector, m = ceil(p)
/// in {1, 2}. `projection` (m rows of length n) defaults to the first m
/// coordinates; a rank-deficient projection is reported as vacuous.
CheckReport assumption_h(const DistributionSpec& spec, double p, double budget,
                         std::optional<double> claimed_r = std::nullopt,
                         const std::vector<std::vector<double>>& projection = {});

struct TailBudgets {
  double paouris = 1.0;
  double projection = 1.0;
};

/// Tail bound (c max{1, r/sqrt n}/t)^{r/2} for P(|X| >= t sqrt n), the
/// log-log slope <= -r/2 + 0.5, and the projection bound
/// P(|PX| >= t sqrt k) <= budget t^{-4} k^{-2} for t >= C1(a).
CheckReport tail(const DistributionSpec& spec, const std::vector<double>& t_grid, std::size_t n_samples,
                 std::uint64_t seed, const TailBudgets& budgets,
                 std::optional<double> claimed_r = std::nullopt);

/// p >= 1: (E|X|^{-p})^{-1/p} >= c c4 (E|X| - C sigma_p), vacuous when
/// E|X| < C sigma_p. 0 < p < 1: (E|X|^{-p})^{-1/p} >= c (1-p)(r-1)/r^2 E|X|.
CheckReport negative(const DistributionSpec& spec, double p, std::size_t n_samples, std::uint64_t seed,
                     double budget_c, double budget_C, std::optional<double> claimed_r = std::nullopt);

struct SmallBallBudgets {
  /// Multiplies eps: the bound is (2 budget eps / c4)^p.
  double bound = 1.0;
  /// C in the gate E|X| >= 2 C sigma_p.
  double gate = 1.0;
  /// Log-concave specs: fitted exponent of eps must exceed exponent * sqrt(n).
  double exponent = 1.0;
};

CheckReport small_ball(const DistributionSpec& spec, double p, const std::vector<double>& eps_grid,
                       std::size_t n_samples, std::uint64_t seed, const SmallBallBudgets& budgets,
                       std::optional<double> claimed_r = std::nullopt);

struct BorellBudgets {
  double lemma13 = 1.0;
  double lemma14 = 1.0;
  double lemma15 = 1.0;
};

/// Exact-CDF checks on the symmetric density r (1 + |t|)^{-r-1}/2.
/// `lemmas` selects among 13 (Borell tail, moment ratio), 14 (median tail,
/// moments against the median) and 15 (small ball at the median, negative
/// moments). Empty grids fall back to defaults.
CheckReport borell_1d(double r, const std::set<int>& lemmas, const BorellBudgets& budgets,
                      std::vector<double> q_grid = {}, std::vector<double> t_grid = {},
                      std::vector<double> eps_grid = {});

/// Median over seeds of ||(1/N) sum X X^T - I|| for N = n 2^k, k = 0..k_max;
/// asserts the slope over k >= 1 lies in [-0.65, -0.35] and each median is
/// at most budget sqrt(n/N).
CheckReport covariance_sweep(const DistributionSpec& spec, int k_max, int seeds, std::uint64_t seed,
                             double budget);

/// Default r for heavy-tailed sweeps: max{4, 2 a log(2n)}.
double sweep_r(int dim, double a = 4.0);

/// P(||X| - E|X|| >= t sqrt n) across dimensions. Never fails.
CheckReport thinshell(Family family, std::optional<double> r, const std::vector<int>& dims, double t,
                      std::size_t n_samples, std::uint64_t seed);

/// Restriction lemma for both F families, swept over kBudgetSweep. In 1-D a
/// tilted Borell-form density with the same r is checked alongside.
CheckReport restriction(const DistributionSpec& spec, double p, std::optional<double> claimed_r = std::nullopt);

CheckReport concave2(const DistributionSpec& spec, double p, std::optional<double> claimed_r = std::nullopt);

/// The polar identity in the plane; relative gap must not exceed `tol`.
CheckReport polar_formula(const DistributionSpec& spec, double tol = 1e-6);

CheckReport polar_levelset(const DistributionSpec& spec, double p, std::optional<double> claimed_r = std::nullopt);

/// G(beta) nondecreasing for concave phi; constant for phi(x) = x - s.
CheckReport lemma11();

/// g(0) >= ((beta-2)/(beta-1))^beta ||g||_inf on 20 centered densities, and
/// the factor's beta -> inf limit e^{-m}.
CheckReport lemma12();

/// Monte Carlo strong, directional and negative moments, and the plain mean
/// of |X|^p, against the radial oracles, each within z estimated standard errors.
CheckReport oracle_agreement(const DistributionSpec& spec, std::vector<double> p_grid, std::size_t n_samples,
                             std::uint64_t seed, double z = 3.0);

}  // namespace convexmoments::verify
