#include "convexmoments/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "convexmoments/constants.hpp"
#include "convexmoments/estimators.hpp"
#include "convexmoments/numerics.hpp"
#include "convexmoments/parallel.hpp"

namespace convexmoments::geometry {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBisectTol = 1e-10;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Distance from `from` along `direction` (+1 or -1) to where g falls below
// `level`; infinity if it never does within a huge range.
double level_crossing(const Density1D& g, double from, double direction, double level) {
  double step = 1.0;
  while (g(from + direction * step) >= level) {
    step *= 2.0;
    if (step > 1e15) return kInf;
  }
  return numerics::bisect([&](double d) { return g(from + direction * d) - level; }, 0.0, step,
                          kBisectTol);
}

double cross(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

void require_alpha(double alpha) {
  if (!(alpha >= 1.0)) throw std::invalid_argument("level set requires alpha >= 1");
}

double claimed_concavity(const DistributionSpec& spec, std::optional<double> claimed_r) {
  if (!claimed_r) {
    if (std::isinf(spec.r())) {
      throw HypothesisError("log-concave spec: pass the r at which it is treated as (-1/r)-concave");
    }
    return spec.r();
  }
  if (*claimed_r > spec.r()) {
    throw HypothesisError("claimed r exceeds the concavity parameter of the spec");
  }
  return *claimed_r;
}

void require_moment_range(double p, double r) {
  if (!(r > 1.0)) throw HypothesisError("requires r > 1");
  if (!(p < r)) throw HypothesisError("requires p < r");
  if (!(p >= 1.0)) throw HypothesisError("requires p >= 1");
}

// A one-dimensional density with the information quadrature needs.
struct Line {
  Density1D g;
  std::vector<double> breakpoints;
  double window = 50.0;
};

Line line_of(const BorellDensity1D& g) {
  return {[g](double t) { return g(t); }, g.breakpoints(), 50.0};
}

Line line_of(const DistributionSpec& spec) {
  return {[spec](double t) {
            const double x[1] = {t};
            return std::exp(density_log(spec, x));
          },
          {0.0}, 20.0 * spec.scale()};
}

double pth_abs_moment(const Line& line, double p) {
  return numerics::integrate([&](double t) { return std::pow(std::abs(t), p) * line.g(t); }, -kInf,
                             kInf, 1e-10, line.breakpoints);
}

RestrictionResult restriction_line(const Line& line, double r, double p, FKind kind, double budget) {
  if (!(p > 0.0) || !(p < r)) throw HypothesisError("restriction lemma requires 0 < p < r");
  RestrictionResult out;
  out.alpha = std::exp(constants::log_alpha_factor(p, r, 1, budget));
  out.body = level_set_1d(line.g, out.alpha, line.window);
  out.origin_inside = out.body.contains_origin;
  const LevelSetBody& body = out.body;
  const auto F = [&](double t) {
    if (kind == FKind::linear_power) return std::pow(std::abs(t), p);
    const double x[1] = {t};
    return std::pow(gauge_eval(body, x), p);
  };
  std::vector<double> cuts = line.breakpoints;
  if (std::isfinite(body.a)) cuts.push_back(body.a);
  if (std::isfinite(body.b)) cuts.push_back(body.b);
  const auto integrand = [&](double t) { return F(t) * line.g(t); };
  out.expectation = numerics::integrate(integrand, -kInf, kInf, 1e-10, cuts);
  out.restricted = numerics::integrate(integrand, body.a, body.b, 1e-10, cuts);
  out.ratio = out.expectation / out.restricted;
  out.bound = constants::restriction_factor(p, r, budget);
  out.doubling_ok = true;
  for (double t : {-100.0, -10.0, -1.0, -0.1, 0.1, 1.0, 10.0, 100.0}) {
    if (F(2.0 * t) > std::pow(2.0, p) * F(t) * (1.0 + 1e-12)) out.doubling_ok = false;
  }
  return out;
}

Concave2Result concave2_line(const Line& line, double r, double p, double budget) {
  require_moment_range(p, r);
  if (std::ceil(p) != 1.0) throw HypothesisError("one-dimensional instance requires ceil(p) = 1");
  Concave2Result out;
  out.alpha = constants::level_alpha_factor(p, r, budget);
  out.c3 = constants::c3_factor(p, r, budget);
  out.body = level_set_1d(line.g, out.alpha, line.window);
  out.origin_inside = out.body.contains_origin;
  const double lhs = std::pow(pth_abs_moment(line, p), 1.0 / p);
  // Both directions t = +1 and t = -1 give max_K |x|.
  const double reach = std::max(std::abs(out.body.a), std::abs(out.body.b));
  out.ratio = lhs / (out.c3 * reach);
  return out;
}

// int_0^R rho^q g(rho) d rho for the radial profile of a planar spec.
double planar_radial_integral(const DistributionSpec& spec, double q, double upper) {
  const auto integrand = [&](double rho) {
    if (!(rho > 0.0) || std::isinf(rho)) return 0.0;
    return std::exp(q * std::log(rho) + log_radial_profile(spec, rho));
  };
  const double s = spec.scale();
  std::vector<double> cuts;
  for (int k = -4; k <= 12; ++k) cuts.push_back(s * std::ldexp(1.0, k));
  if (std::isinf(upper)) {
    const double last = cuts.back();
    cuts.pop_back();
    return numerics::integrate(integrand, 0.0, last, 1e-10, cuts) +
           numerics::integrate_endpoint_singular(integrand, last, kInf, 1e-10);
  }
  return numerics::integrate(integrand, 0.0, upper, 1e-10, cuts);
}

Density2D planar_density(const DistributionSpec& spec) {
  return [spec](double x, double y) {
    const double pt[2] = {x, y};
    return std::exp(density_log(spec, pt));
  };
}

void require_planar_radial(const DistributionSpec& spec) {
  if (spec.dim() != 2 || !spec.radial()) {
    throw std::invalid_argument("planar instance requires a radial spec with dim = 2");
  }
}

}  // namespace

double LevelSetBody::volume() const {
  if (dim == 1) return b - a;
  const std::size_t m = ray_lengths.size();
  if (m == 0) return 0.0;
  const double h = 2.0 * kPi / static_cast<double>(m);
  double area = 0.0;
  for (std::size_t j = 0; j < m; ++j) area += ray_lengths[j] * ray_lengths[(j + 1) % m];
  return 0.5 * std::sin(h) * area;
}

bool LevelSetBody::convex(double tol) const {
  if (dim == 1) return true;
  const std::size_t m = ray_lengths.size();
  if (m < 3) return false;
  double scale = 0.0;
  for (double l : ray_lengths) scale = std::max(scale, l);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t j1 = (j + 1) % m, j2 = (j + 2) % m;
    const double x0 = ray_lengths[j] * std::cos(ray_angles[j]), y0 = ray_lengths[j] * std::sin(ray_angles[j]);
    const double x1 = ray_lengths[j1] * std::cos(ray_angles[j1]), y1 = ray_lengths[j1] * std::sin(ray_angles[j1]);
    const double x2 = ray_lengths[j2] * std::cos(ray_angles[j2]), y2 = ray_lengths[j2] * std::sin(ray_angles[j2]);
    if (cross(x1 - x0, y1 - y0, x2 - x1, y2 - y1) < -tol * scale * scale) return false;
  }
  return true;
}

nlohmann::json to_json(const LevelSetBody& body) {
  nlohmann::json j;
  j["dim"] = body.dim;
  j["alpha"] = body.alpha;
  j["contains_origin"] = body.contains_origin;
  if (body.dim == 1) {
    j["interval"] = {body.a, body.b};
  } else {
    auto rays = nlohmann::json::array();
    for (std::size_t k = 0; k < body.ray_lengths.size(); ++k) {
      rays.push_back({{"angle", body.ray_angles[k]}, {"length", body.ray_lengths[k]}});
    }
    j["rays"] = std::move(rays);
  }
  return j;
}

LevelSetBody level_set_1d(const Density1D& g, double alpha, double window) {
  require_alpha(alpha);
  LevelSetBody body;
  body.dim = 1;
  body.alpha = alpha;
  const double mode = numerics::golden_section_argmax(g, -window, window, 1e-12);
  body.sup_norm = g(mode);
  const double level = body.sup_norm / alpha;
  body.a = mode - level_crossing(g, mode, -1.0, level);
  body.b = mode + level_crossing(g, mode, 1.0, level);
  body.contains_origin = body.a < 0.0 && body.b > 0.0;
  return body;
}

LevelSetBody level_set_2d(const Density2D& g, double alpha, int rays, double window) {
  require_alpha(alpha);
  if (rays < 3) throw std::invalid_argument("level_set_2d needs at least three rays");
  LevelSetBody body;
  body.dim = 2;
  body.alpha = alpha;
  double mx = 0.0, my = 0.0;
  for (int sweep = 0; sweep < 30; ++sweep) {
    const double px = mx, py = my;
    mx = numerics::golden_section_argmax([&](double x) { return g(x, my); }, -window, window, 1e-12);
    my = numerics::golden_section_argmax([&](double y) { return g(mx, y); }, -window, window, 1e-12);
    if (std::abs(mx - px) + std::abs(my - py) < 1e-12) break;
  }
  body.sup_norm = std::max(g(mx, my), g(0.0, 0.0));
  const double level = body.sup_norm / (alpha * alpha);
  body.contains_origin = g(0.0, 0.0) > level;
  if (!body.contains_origin) return body;
  body.ray_angles.resize(rays);
  body.ray_lengths.resize(rays);
  const double h = 2.0 * kPi / rays;
  parallel_for(static_cast<std::size_t>(rays), [&](std::size_t j) {
    const double theta = h * static_cast<double>(j);
    const double c = std::cos(theta), s = std::sin(theta);
    body.ray_angles[j] = theta;
    body.ray_lengths[j] = level_crossing([&](double t) { return g(t * c, t * s); }, 0.0, 1.0, level);
  });
  return body;
}

double gauge_eval(const LevelSetBody& body, std::span<const double> x) {
  if (!body.contains_origin) throw std::invalid_argument("gauge requires 0 in the interior of the body");
  if (body.dim == 1) {
    if (x.size() != 1) throw std::invalid_argument("gauge: point dimension mismatch");
    const double t = x[0];
    if (t == 0.0) return 0.0;
    return t > 0.0 ? t / body.b : t / body.a;
  }
  if (x.size() != 2) throw std::invalid_argument("gauge: point dimension mismatch");
  if (x[0] == 0.0 && x[1] == 0.0) return 0.0;
  const std::size_t m = body.ray_lengths.size();
  const double h = 2.0 * kPi / static_cast<double>(m);
  double theta = std::atan2(x[1], x[0]);
  if (theta < 0.0) theta += 2.0 * kPi;
  const std::size_t j = static_cast<std::size_t>(std::floor(theta / h)) % m;
  const std::size_t j1 = (j + 1) % m;
  const double vx = body.ray_lengths[j] * std::cos(body.ray_angles[j]);
  const double vy = body.ray_lengths[j] * std::sin(body.ray_angles[j]);
  const double wx = body.ray_lengths[j1] * std::cos(body.ray_angles[j1]);
  const double wy = body.ray_lengths[j1] * std::sin(body.ray_angles[j1]);
  const double ex = wx - vx, ey = wy - vy;
  return cross(ex, ey, x[0], x[1]) / cross(ex, ey, vx, vy);
}

double support_value(const LevelSetBody& body, std::span<const double> t) {
  if (body.dim == 1) return t[0] >= 0.0 ? t[0] * body.b : t[0] * body.a;
  double best = -kInf;
  for (std::size_t j = 0; j < body.ray_lengths.size(); ++j) {
    const double vx = body.ray_lengths[j] * std::cos(body.ray_angles[j]);
    const double vy = body.ray_lengths[j] * std::sin(body.ray_angles[j]);
    best = std::max(best, vx * t[0] + vy * t[1]);
  }
  return best;
}

std::string_view to_string(FKind kind) {
  return kind == FKind::gauge_power ? "gauge_power" : "linear_power";
}

FKind parse_fkind(std::string_view name) {
  if (name == "gauge_power") return FKind::gauge_power;
  if (name == "linear_power") return FKind::linear_power;
  throw std::invalid_argument("unknown F kind '" + std::string(name) + "'");
}

double BorellDensity1D::operator()(double t) const {
  const double v = f(t + shift);
  return std::exp(-beta * std::log(v) - log_normalizer);
}

std::vector<double> BorellDensity1D::breakpoints() const {
  std::vector<double> out;
  for (double k : kinks) {
    out.push_back(k - shift);
    out.push_back(k - shift - 1.0);
    out.push_back(k - shift + 1.0);
  }
  out.push_back(0.0);
  return out;
}

BorellDensity1D make_borell_density_1d(std::function<double(double)> f, double beta,
                                       std::vector<double> kinks, bool center) {
  BorellDensity1D g;
  g.f = std::move(f);
  g.beta = beta;
  g.kinks = std::move(kinks);
  const auto cuts = g.breakpoints();
  const auto h = [&](double t) { return std::exp(-beta * std::log(g.f(t))); };
  const double z = numerics::integrate(h, -kInf, kInf, 1e-12, cuts);
  if (!(z > 0.0) || !std::isfinite(z)) throw std::invalid_argument("f^{-beta} is not integrable");
  g.log_normalizer = std::log(z);
  if (center) {
    if (!(beta > 2.0)) throw std::invalid_argument("centering requires a finite mean (beta > 2)");
    const double mean = numerics::integrate([&](double t) { return t * h(t); }, -kInf, kInf, 1e-12, cuts) / z;
    g.shift = mean;
  }
  return g;
}

RestrictionResult restriction_check(const BorellDensity1D& g, double r, double p, FKind kind,
                                    double budget) {
  if (std::abs(g.beta - (1.0 + r)) > 1e-12) {
    throw HypothesisError("restriction lemma requires beta = m + r");
  }
  return restriction_line(line_of(g), r, p, kind, budget);
}

RestrictionResult restriction_check(const DistributionSpec& spec, double p, FKind kind, double budget,
                                    std::optional<double> claimed_r) {
  const double r = claimed_concavity(spec, claimed_r);
  if (spec.dim() == 1) return restriction_line(line_of(spec), r, p, kind, budget);
  require_planar_radial(spec);
  if (!(p > 0.0) || !(p < r)) throw HypothesisError("restriction lemma requires 0 < p < r");

  RestrictionResult out;
  out.alpha = std::exp(constants::log_alpha_factor(p, r, 2, budget));
  out.body = level_set_2d(planar_density(spec), out.alpha, 720, 20.0 * spec.scale());
  out.origin_inside = out.body.contains_origin;
  out.bound = constants::restriction_factor(p, r, budget);
  if (!out.origin_inside) return out;
  const LevelSetBody& body = out.body;
  const std::size_t m = body.ray_lengths.size();
  const double h = 2.0 * kPi / static_cast<double>(m);
  // Homogeneity of F splits each integral into angle and radius factors.
  std::vector<double> restricted(m);
  parallel_for(m, [&](std::size_t j) {
    restricted[j] = planar_radial_integral(spec, p + 1.0, body.ray_lengths[j]);
  });
  const double full = planar_radial_integral(spec, p + 1.0, kInf);
  out.expectation = 0.0;
  out.restricted = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double th = body.ray_angles[j];
    const double e[2] = {std::cos(th), std::sin(th)};
    const double weight = kind == FKind::linear_power ? std::pow(std::abs(e[0]), p)
                                                      : std::pow(gauge_eval(body, e), p);
    out.expectation += h * weight * full;
    out.restricted += h * weight * restricted[j];
  }
  out.ratio = out.expectation / out.restricted;
  // Both F are exactly p-homogeneous.
  out.doubling_ok = true;
  return out;
}

Concave2Result concave2_check(const BorellDensity1D& g, double r, double p, double budget) {
  return concave2_line(line_of(g), r, p, budget);
}

Concave2Result concave2_check(const DistributionSpec& spec, double p, double budget,
                              std::optional<double> claimed_r) {
  const double r = claimed_concavity(spec, claimed_r);
  if (spec.dim() == 1) return concave2_line(line_of(spec), r, p, budget);
  require_planar_radial(spec);
  require_moment_range(p, r);
  if (std::ceil(p) != 2.0) throw HypothesisError("planar instance requires ceil(p) = 2");
  Concave2Result out;
  out.alpha = constants::level_alpha_factor(p, r, budget);
  out.c3 = constants::c3_factor(p, r, budget);
  out.body = level_set_2d(planar_density(spec), out.alpha, 720, 20.0 * spec.scale());
  out.origin_inside = out.body.contains_origin;
  if (!out.origin_inside) return out;
  const double lhs = std::pow(radial_moment_quadrature(spec, p) * sphere_coordinate_moment(2, p), 1.0 / p);
  for (int k = 0; k < 16; ++k) {
    const double th = kPi * k / 16.0;
    const double t[2] = {std::cos(th), std::sin(th)};
    const double neg[2] = {-t[0], -t[1]};
    const double reach = std::max(support_value(out.body, t), support_value(out.body, neg));
    out.ratio = std::max(out.ratio, lhs / (out.c3 * reach));
  }
  return out;
}

double g0_factor(double beta, double m) {
  return std::exp(beta * std::log((beta - m - 1.0) / (beta - 1.0)));
}

G0Result g0_bound_check(const BorellDensity1D& g) {
  if (!(g.beta > 2.0)) throw HypothesisError("g(0) bound requires beta > m + 1 = 2");
  G0Result out;
  const auto cuts = g.breakpoints();
  out.mean = numerics::integrate([&](double t) { return t * g(t); }, -kInf, kInf, 1e-12, cuts);
  if (std::abs(out.mean) > 1e-6) {
    throw std::invalid_argument("g(0) bound requires a centered density (|mean| > 1e-6)");
  }
  const double mode = numerics::golden_section_argmax([&](double t) { return g(t); }, -50.0, 50.0, 1e-12);
  out.sup_norm = g(mode);
  out.g0 = g(0.0);
  out.factor = g0_factor(g.beta);
  out.margin = out.g0 - out.factor * out.sup_norm;
  return out;
}

double g_function(const std::function<double(double)>& phi, double s, double m, double beta) {
  if (!(s > 0.0)) throw std::invalid_argument("G requires s > 0");
  if (!(beta > m + 1.0) || !(m + 1.0 > 0.0)) throw HypothesisError("G requires beta > m + 1 > 0");
  // x = s/u maps [s, inf) onto (0, 1]; the integrand becomes
  // phi(s/u)^m (s/u)^{-beta} s / u^2, with an integrable power at u = 0.
  const double log_s = std::log(s);
  const auto integrand = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double x = s / u;
    const double v = phi(x);
    if (v <= 0.0) return 0.0;
    return std::exp(m * std::log(v) - beta * (log_s - std::log(u)) + log_s - 2.0 * std::log(u));
  };
  const double integral = numerics::integrate_endpoint_singular(integrand, 0.0, 1.0, 1e-13);
  const double log_den = (m - beta + 1.0) * log_s + numerics::log_beta(m + 1.0, beta - m - 1.0);
  return integral / std::exp(log_den);
}

GMonotonicityResult G_monotonicity_check(const std::function<double(double)>& phi, double s, double m,
                                         const std::vector<double>& beta_grid, double rel_slack) {
  GMonotonicityResult out;
  out.concave = true;
  for (double width : {s, 16.0 * s, 1024.0 * s}) {
    constexpr int kPoints = 257;
    const double h = width / (kPoints - 1);
    double prev2 = phi(s), prev1 = phi(s + h);
    if (prev2 < 0.0 || prev1 < 0.0) out.concave = false;
    for (int i = 2; i < kPoints; ++i) {
      const double cur = phi(s + h * i);
      if (cur < 0.0) out.concave = false;
      const double scale = 1.0 + std::max({std::abs(prev2), std::abs(prev1), std::abs(cur)});
      if (prev1 < 0.5 * (prev2 + cur) - 1e-12 * scale) out.concave = false;
      prev2 = prev1;
      prev1 = cur;
    }
  }
  if (!out.concave) throw std::invalid_argument("phi fails the midpoint concavity test");
  out.betas = beta_grid;
  std::sort(out.betas.begin(), out.betas.end());
  out.values.resize(out.betas.size());
  parallel_for(out.betas.size(), [&](std::size_t k) { out.values[k] = g_function(phi, s, m, out.betas[k]); });
  out.nondecreasing = true;
  for (std::size_t k = 1; k < out.values.size(); ++k) {
    if (out.values[k] < out.values[k - 1] * (1.0 - rel_slack)) out.nondecreasing = false;
  }
  for (double v : out.values) {
    out.spread = std::max(out.spread, std::abs(v - out.values.front()) / out.values.front());
  }
  return out;
}

PolarFormulaResult polar_formula_check(const DistributionSpec& spec, int m) {
  if (spec.dim() != 2 || m != 1) {
    throw std::invalid_argument("polar formula check supports only n = 2, m = 1");
  }
  if (!spec.radial()) throw std::invalid_argument("polar formula check requires a radial spec");
  PolarFormulaResult out;
  out.lhs = 1.0 / radial_moment_quadrature(spec, -1.0, 1e-12);
  const auto gauss = make_distribution(Family::gaussian, 2, kLogConcave, false);
  const double gauss_neg = radial_moment_quadrature(gauss, -1.0, 1e-12);
  out.marginal_at_zero = marginal_density_at_radius(spec, 1, 0.0);
  out.rhs = 1.0 / (std::sqrt(2.0 * kPi) * gauss_neg * out.marginal_at_zero);
  out.gap = std::abs(out.lhs - out.rhs) / out.lhs;
  return out;
}

PolarLevelsetResult polar_levelset_check(const DistributionSpec& spec, double p, double r, double budget) {
  if (!spec.radial() || spec.dim() < 2) {
    throw std::invalid_argument("polar level-set check requires a radial spec with n >= 2");
  }
  require_moment_range(p, r);
  if (r > spec.r()) throw HypothesisError("r exceeds the concavity parameter of the spec");
  PolarLevelsetResult out;
  out.sigma_p = std::pow(radial_moment_quadrature(spec, p) * sphere_coordinate_moment(spec.dim(), p), 1.0 / p);
  out.segment_length = 2.0 * out.sigma_p;
  out.alpha = constants::level_alpha_factor(p, r, budget);
  out.c3 = constants::c3_factor(p, r, budget);
  const auto body = level_set_1d([&](double u) { return marginal_density_at_radius(spec, 1, u); },
                                 out.alpha, 20.0 * spec.scale());
  out.interval_length = body.volume();
  out.origin_inside = body.contains_origin;
  out.ratio = out.segment_length / (4.0 * out.c3 * out.interval_length);
  return out;
}

}  // namespace convexmoments::geometry
