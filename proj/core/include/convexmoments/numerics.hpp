#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

/// Quadrature, special functions and small solvers shared by every module.
namespace convexmoments::numerics {

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod on [a, b]. Either end may be infinite. Interior
/// breakpoints split the range where the integrand has kinks or jumps.
double integrate(const Integrand& f, double a, double b, double rel_tol = 1e-10,
                 std::span<const double> breakpoints = {});

/// Tanh-sinh quadrature; tolerates integrable singularities at the endpoints.
double integrate_endpoint_singular(const Integrand& f, double a, double b,
                                   double rel_tol = 1e-10);

double log_beta(double u, double v);
double beta(double u, double v);

/// log of the surface area of the unit sphere S^{dim-1} in R^dim.
double log_sphere_area(int dim);

/// log of the volume of the unit ball in R^dim.
double log_ball_volume(int dim);

/// Root of f on [lo, hi]; f(lo) and f(hi) must have opposite signs.
double bisect(const Integrand& f, double lo, double hi, double abs_tol);

/// Location of the maximum of a unimodal f on [lo, hi].
double golden_section_argmax(const Integrand& f, double lo, double hi, double abs_tol);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Residual standard error of the slope; 0 for two points.
  double slope_se = 0.0;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y);

/// Median of the values; the mean of the two middle order statistics for even sizes.
double median(std::vector<double> values);

/// Standard normal quantile used for two-sided 95% intervals.
inline constexpr double kZ95 = 1.959963984540054;

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Wilson score interval for a binomial proportion at 95%.
Interval wilson_interval(std::size_t successes, std::size_t trials);

}  // namespace convexmoments::numerics
