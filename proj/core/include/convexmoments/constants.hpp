#pragma once

#include <optional>

#include <nlohmann/json.hpp>

/// Structure factors of the explicit bounds, with every unnamed universal
/// constant set to 1. Checks multiply by their own budgets.
namespace convexmoments::constants {

struct ConstantBundle {
  double p = 0.0;
  double r = 0.0;
  int m = 0;
  /// Moment-ratio factor: p when r > p + 1, otherwise r / (r - p)^{1/p}.
  double c1_factor = 0.0;
  /// (r/(r-1))^3 (r/(r-p))^4.
  double c2_factor = 0.0;
  /// (1 + 1/(r-p))^{1/p}.
  double c3_factor = 0.0;
  /// (r^2/((r-p)(r-1)))^{-3} (1 + 1/(r-p))^{-1/p}.
  double c4_factor = 0.0;
  /// ((r+m)^2/((r-p)(r-1)))^{(r+m)/m}; may be +inf when it overflows.
  double alpha_factor = 0.0;
  /// Same expression as c2_factor (the projection hypothesis constant).
  double lambda_factor = 0.0;
  /// 1 + 1/(r-p).
  double restriction_factor = 0.0;
  /// (r^2/((r-p)(r-1)))^3, the level used for one-dimensional marginal bodies.
  double level_alpha_factor = 0.0;
};

/// Requires r > 1 and 1 <= p < r; m defaults to ceil(p).
ConstantBundle constant_bundle(double p, double r, std::optional<int> m = std::nullopt);

nlohmann::json to_json(const ConstantBundle& bundle);

double c1_factor(double p, double r);
double c2_factor(double p, double r);
double c3_factor(double p, double r, double c = 1.0);
double c4_factor(double p, double r);
double log_alpha_factor(double p, double r, int m, double c = 1.0);
double level_alpha_factor(double p, double r, double c = 1.0);
double restriction_factor(double p, double r, double c = 1.0);

/// L_p norm of a standard Gaussian scalar.
double gamma_p(double p);

double beta_fn(double u, double v);

/// (1 + t/(3r))^{-r}: bound for P(|X| >= 3 t E|X|), t >= 1.
double borell_tail(double t, double r);

/// (c max{1, r/sqrt(n)} / t)^{r/2} clamped to [0, 1].
double paouris_tail(double t, int n, double r, double c_budget);

/// gamma_p / (sqrt(p) gamma_1).
double subgaussian_ratio(double p);

/// Strong-regularity constants C1(a) = C e^{4/a}, C2(a) = C max{(a log a)^4, e^{32/a}}
/// with C = 1.
double strong_regularity_c1(double a);
double strong_regularity_c2(double a);

}  // namespace convexmoments::constants
