#include "convexmoments/constants.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "convexmoments/errors.hpp"
#include "convexmoments/numerics.hpp"

namespace convexmoments::constants {

namespace {

void require_range(double p, double r) {
  if (!(r > 1.0)) throw HypothesisError("requires r > 1");
  if (!(p < r)) throw HypothesisError("requires p < r");
  if (!(p > 0.0)) throw HypothesisError("requires p > 0");
}

// log(r/(r-a)); zero in the log-concave limit r = inf.
double log_ratio(double a, double r) { return -std::log1p(-a / r); }

// log(r^2 / ((r-p)(r-1)))
double log_base(double p, double r) { return log_ratio(p, r) + log_ratio(1.0, r); }

}  // namespace

double c1_factor(double p, double r) {
  require_range(p, r);
  if (r > p + 1.0) return p;
  return r / std::pow(r - p, 1.0 / p);
}

double c2_factor(double p, double r) {
  require_range(p, r);
  return std::exp(3.0 * log_ratio(1.0, r) + 4.0 * log_ratio(p, r));
}

double c3_factor(double p, double r, double c) {
  require_range(p, r);
  return std::exp(std::log1p(c / (r - p)) / p);
}

double c4_factor(double p, double r) {
  require_range(p, r);
  return std::exp(-3.0 * log_base(p, r) - std::log1p(1.0 / (r - p)) / p);
}

double log_alpha_factor(double p, double r, int m, double c) {
  require_range(p, r);
  if (m < 1) throw std::invalid_argument("alpha factor requires m >= 1");
  if (std::isinf(r)) {
    // (1 + (2m+p+1)/r + O(r^-2))^{r/m} tends to exp((2m+p+1)/m) when c = 1.
    if (c == 1.0) return (2.0 * m + p + 1.0) / m;
    return c > 1.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  }
  const double rm = r + m;
  return rm / m * (std::log(c) + 2.0 * std::log1p(m / r) + log_ratio(p, r) + log_ratio(1.0, r));
}

double level_alpha_factor(double p, double r, double c) {
  require_range(p, r);
  return c * std::exp(3.0 * log_base(p, r));
}

double restriction_factor(double p, double r, double c) {
  require_range(p, r);
  return 1.0 + c / (r - p);
}

ConstantBundle constant_bundle(double p, double r, std::optional<int> m) {
  if (!(r > 1.0)) throw HypothesisError("requires r > 1");
  if (!(p >= 1.0)) throw HypothesisError("requires p >= 1");
  if (!(p < r)) throw HypothesisError("requires p < r");
  ConstantBundle b;
  b.p = p;
  b.r = r;
  b.m = m.value_or(static_cast<int>(std::ceil(p)));
  b.c1_factor = c1_factor(p, r);
  b.c2_factor = c2_factor(p, r);
  b.c3_factor = c3_factor(p, r);
  b.c4_factor = c4_factor(p, r);
  const double la = log_alpha_factor(p, r, b.m);
  b.alpha_factor = la > std::log(std::numeric_limits<double>::max())
                       ? std::numeric_limits<double>::infinity()
                       : std::exp(la);
  b.lambda_factor = b.c2_factor;
  b.restriction_factor = restriction_factor(p, r);
  b.level_alpha_factor = level_alpha_factor(p, r);
  return b;
}

nlohmann::json to_json(const ConstantBundle& b) {
  nlohmann::json j;
  j["p"] = b.p;
  if (std::isfinite(b.r)) {
    j["r"] = b.r;
  } else {
    j["r"] = "inf";
  }
  j["m"] = b.m;
  j["c1_factor"] = b.c1_factor;
  j["c2_factor"] = b.c2_factor;
  j["c3_factor"] = b.c3_factor;
  j["c4_factor"] = b.c4_factor;
  if (std::isfinite(b.alpha_factor)) {
    j["alpha_factor"] = b.alpha_factor;
  } else {
    j["alpha_factor"] = "inf";
  }
  j["lambda_factor"] = b.lambda_factor;
  j["restriction_factor"] = b.restriction_factor;
  j["level_alpha_factor"] = b.level_alpha_factor;
  return j;
}

double gamma_p(double p) {
  if (!(p > 0.0)) throw std::invalid_argument("gamma_p requires p > 0");
  const double log_moment =
      0.5 * p * std::log(2.0) + std::lgamma(0.5 * (p + 1.0)) - std::lgamma(0.5);
  return std::exp(log_moment / p);
}

double beta_fn(double u, double v) { return numerics::beta(u, v); }

double borell_tail(double t, double r) {
  if (!(r > 1.0)) throw HypothesisError("requires r > 1");
  return std::exp(-r * std::log1p(t / (3.0 * r)));
}

double paouris_tail(double t, int n, double r, double c_budget) {
  if (!(t > 0.0)) throw std::invalid_argument("paouris_tail requires t > 0");
  if (!(r > 2.0)) throw HypothesisError("requires r > 2");
  const double base = c_budget * std::max(1.0, r / std::sqrt(static_cast<double>(n))) / t;
  if (base >= 1.0) return 1.0;
  return std::pow(base, 0.5 * r);
}

double subgaussian_ratio(double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("subgaussian_ratio requires p >= 1");
  return gamma_p(p) / (std::sqrt(p) * gamma_p(1.0));
}

double strong_regularity_c1(double a) {
  if (!(a > 0.0)) throw std::invalid_argument("requires a > 0");
  return std::exp(4.0 / a);
}

double strong_regularity_c2(double a) {
  if (!(a > 1.0)) throw std::invalid_argument("requires a > 1");
  return std::max(std::pow(a * std::log(a), 4.0), std::exp(32.0 / a));
}

}  // namespace convexmoments::constants
