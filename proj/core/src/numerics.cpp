#include "convexmoments/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace convexmoments::numerics {

namespace {

constexpr unsigned kMaxDepth = 20;

double gk_piece(const Integrand& f, double a, double b, double rel_tol) {
  if (a == b) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  if (std::isinf(a) || std::isinf(b)) {
    // Half-infinite tails decay algebraically for the heavy-tailed families;
    // tanh-sinh handles the resulting endpoint behaviour after mapping.
    return integrate_endpoint_singular(f, a, b, rel_tol);
  }
  double error = 0.0;
  return gauss_kronrod<double, 31>::integrate(f, a, b, kMaxDepth, rel_tol, &error);
}

}  // namespace

double integrate(const Integrand& f, double a, double b, double rel_tol,
                 std::span<const double> breakpoints) {
  if (a > b) return -integrate(f, b, a, rel_tol, breakpoints);
  std::vector<double> cuts;
  cuts.push_back(a);
  for (double c : breakpoints) {
    if (c > a && c < b) cuts.push_back(c);
  }
  std::sort(cuts.begin() + 1, cuts.end());
  cuts.push_back(b);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += gk_piece(f, cuts[i], cuts[i + 1], rel_tol);
  }
  return total;
}

double integrate_endpoint_singular(const Integrand& f, double a, double b, double rel_tol) {
  if (a == b) return 0.0;
  thread_local boost::math::quadrature::tanh_sinh<double> integrator(15);
  double error = 0.0;
  double l1 = 0.0;
  return integrator.integrate(f, a, b, rel_tol, &error, &l1);
}

double log_beta(double u, double v) {
  if (!(u > 0.0) || !(v > 0.0)) throw std::invalid_argument("beta: arguments must be positive");
  return std::lgamma(u) + std::lgamma(v) - std::lgamma(u + v);
}

double beta(double u, double v) { return std::exp(log_beta(u, v)); }

double log_sphere_area(int dim) {
  if (dim < 1) throw std::invalid_argument("sphere area: dim must be >= 1");
  const double half = 0.5 * dim;
  return std::log(2.0) + half * std::log(std::numbers::pi) - std::lgamma(half);
}

double log_ball_volume(int dim) {
  if (dim < 1) throw std::invalid_argument("ball volume: dim must be >= 1");
  const double half = 0.5 * dim;
  return half * std::log(std::numbers::pi) - std::lgamma(half + 1.0);
}

double bisect(const Integrand& f, double lo, double hi, double abs_tol) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw std::invalid_argument("bisect: root not bracketed");
  for (int it = 0; it < 400 && hi - lo > abs_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double golden_section_argmax(const Integrand& f, double lo, double hi, double abs_tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 400 && hi - lo > abs_tol; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    }
  }
  return 0.5 * (lo + hi);
}

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("least_squares: need at least two paired points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("least_squares: degenerate abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = y[i] - fit.intercept - fit.slope * x[i];
      rss += e * e;
    }
    fit.slope_se = std::sqrt(rss / (n - 2.0) / sxx);
  }
  return fit;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty set");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

Interval wilson_interval(std::size_t successes, std::size_t trials) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half = kZ95 * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    if (successes == 0) return {0.0, std::min(1.0, center + half)};
  if (successes == trials) return {std::max(0.0, center - half), 1.0};
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace convexmoments::numerics
