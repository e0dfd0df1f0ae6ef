#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "convexmoments/distributions.hpp"

/// Level-set bodies K_alpha(g) = {t : g(t) >= alpha^{-m} ||g||_inf} in one and
/// two dimensions, their gauges, and quadrature checks of the geometric lemmas.
namespace convexmoments::geometry {

using Density1D = std::function<double(double)>;
using Density2D = std::function<double(double, double)>;

struct LevelSetBody {
  int dim = 1;
  double alpha = 1.0;
  double sup_norm = 0.0;
  /// 1-D: the interval [a, b].
  double a = 0.0;
  double b = 0.0;
  /// 2-D: ray lengths at angles 2 pi j / M, measured from the origin.
  std::vector<double> ray_angles;
  std::vector<double> ray_lengths;
  bool contains_origin = false;

  /// Length (1-D) or polygon area (2-D).
  double volume() const;
  /// Cross products of consecutive polygon edges are nonnegative (2-D);
  /// always true in 1-D.
  bool convex(double tol = 1e-12) const;
};

nlohmann::json to_json(const LevelSetBody& body);

/// `window` bounds the golden-section search for the mode: [-window, window].
LevelSetBody level_set_1d(const Density1D& g, double alpha, double window = 50.0);

/// Rays start at the origin, which must lie in the body. ||g||_inf is found by
/// coordinate golden-section ascent inside [-window, window]^2.
LevelSetBody level_set_2d(const Density2D& g, double alpha, int rays = 720, double window = 50.0);

/// Minkowski functional inf{lambda >= 0 : x in lambda K}.
double gauge_eval(const LevelSetBody& body, std::span<const double> x);

/// max over x in K of <x, t>.
double support_value(const LevelSetBody& body, std::span<const double> t);

/// Convex F with F(2t) <= 2^p F(t) used by the restriction lemma.
enum class FKind { gauge_power, linear_power };

std::string_view to_string(FKind kind);
FKind parse_fkind(std::string_view name);

/// One-dimensional density g = f^{-beta}/Z, translated so that it is centered.
struct BorellDensity1D {
  std::function<double(double)> f;
  double beta = 0.0;
  double shift = 0.0;
  double log_normalizer = 0.0;
  /// Kinks of f (before the shift), used as quadrature breakpoints.
  std::vector<double> kinks;

  double operator()(double t) const;
  /// Breakpoints in the translated coordinate.
  std::vector<double> breakpoints() const;
};

/// Normalizes f^{-beta} and, when `center` is set, re-centers it numerically.
BorellDensity1D make_borell_density_1d(std::function<double(double)> f, double beta,
                                       std::vector<double> kinks = {0.0}, bool center = true);

struct RestrictionResult {
  double alpha = 0.0;
  double expectation = 0.0;
  double restricted = 0.0;
  /// expectation / restricted.
  double ratio = 0.0;
  /// 1 + budget/(r - p).
  double bound = 0.0;
  bool origin_inside = false;
  bool doubling_ok = false;
  LevelSetBody body;
};

/// E F(Y) <= (1 + c/(r-p)) E F(Y) 1_K(Y) with K = K_alpha(g) and
/// alpha = (c (m+r)^2/((r-p)(r-1)))^{(m+r)/m}; c is the budget.
RestrictionResult restriction_check(const BorellDensity1D& g, double r, double p, FKind kind,
                                    double budget);
/// Spec version: dim 1 (any family) or dim 2 (radial), with r taken from the
/// spec or `claimed_r` (which must not exceed it).
RestrictionResult restriction_check(const DistributionSpec& spec, double p, FKind kind, double budget,
                                    std::optional<double> claimed_r = std::nullopt);

struct Concave2Result {
  double alpha = 0.0;
  double c3 = 0.0;
  /// max over tested directions of (E|<Y,t>|^p)^{1/p} / (C3 max_K |<x,t>|).
  double ratio = 0.0;
  bool origin_inside = false;
  LevelSetBody body;
};

/// (E|<Y,t>|^p)^{1/p} <= C3 max_{x in K_alpha} |<x,t>| with
/// alpha = c (r^2/((r-p)(r-1)))^3 and C3 = (1 + c/(r-p))^{1/p}.
Concave2Result concave2_check(const BorellDensity1D& g, double r, double p, double budget);
Concave2Result concave2_check(const DistributionSpec& spec, double p, double budget,
                              std::optional<double> claimed_r = std::nullopt);

struct G0Result {
  double g0 = 0.0;
  double sup_norm = 0.0;
  double factor = 0.0;
  double margin = 0.0;
  double mean = 0.0;
};

/// g(0) - ((beta-2)/(beta-1))^beta ||g||_inf for a centered one-dimensional
/// density. Rejects inputs whose mean exceeds 1e-6 in absolute value.
G0Result g0_bound_check(const BorellDensity1D& g);

/// ((beta-m-1)/(beta-1))^beta.
double g0_factor(double beta, double m = 1.0);

struct GMonotonicityResult {
  std::vector<double> betas;
  std::vector<double> values;
  bool concave = false;
  bool nondecreasing = false;
  /// max |G - G(first)| / G(first).
  double spread = 0.0;
};

/// G(beta) = int_s^inf phi^m x^{-beta} dx / (s^{m-beta+1} B(m+1, beta-m-1)).
double g_function(const std::function<double(double)>& phi, double s, double m, double beta);

/// Evaluates G on the grid (each beta > m + 1) after certifying phi by
/// midpoint concavity tests on [s, s + 64 s]; throws if phi is not concave.
GMonotonicityResult G_monotonicity_check(const std::function<double(double)>& phi, double s, double m,
                                         const std::vector<double>& beta_grid,
                                         double rel_slack = 1e-7);

struct PolarFormulaResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  double marginal_at_zero = 0.0;
};

/// (E|X|^{-1})^{-1} against (2 pi)^{-1/2} (E|G|^{-1})^{-1} g_F(0)^{-1} in the
/// plane (n = 2, m = 1), both sides by quadrature.
PolarFormulaResult polar_formula_check(const DistributionSpec& spec, int m = 1);

struct PolarLevelsetResult {
  double sigma_p = 0.0;
  double segment_length = 0.0;
  double alpha = 0.0;
  double interval_length = 0.0;
  double c3 = 0.0;
  /// segment_length / (4 C3 interval_length).
  double ratio = 0.0;
  bool origin_inside = false;
};

/// vol(P_F K°) <= 4 C3 vol(K_alpha(g_F)) for a line F (m = 1).
PolarLevelsetResult polar_levelset_check(const DistributionSpec& spec, double p, double r,
                                         double budget);

}  // namespace convexmoments::geometry
