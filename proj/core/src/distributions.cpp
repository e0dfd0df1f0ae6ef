#include "convexmoments/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

// Boost 1.74's pchip calls isnan unqualified; make std::isnan visible to it.
namespace boost::math::interpolators {
using std::isnan;
}
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "convexmoments/numerics.hpp"
#include "convexmoments/parallel.hpp"
#include "convexmoments/rng.hpp"

namespace convexmoments {

namespace detail {

// Inverse CDF of R = |X|/s for the Pareto-type radial law
// R ~ BetaPrime(n, r): density x^{n-1} (1+x)^{-(n+r)} / B(n, r).
//
// The CDF is tabulated on log-spaced nodes by cumulative Gauss-Legendre
// quadrature, accumulated from both ends so that the left CDF and the right
// survival function keep full relative precision. Interpolation is a monotone
// cubic in (logit F, log x). Below the first node the law is x^n up to
// O(x) corrections; beyond the last node it is the Pareto tail x^{-r}.
struct RadialSampler {
  static constexpr std::size_t kNodes = 4096;

  int n = 1;
  double r = 2.0;
  double x_first = 0.0;
  double x_last = 0.0;
  double cdf_first = 0.0;
  double survival_last = 0.0;
  double logit_first = 0.0;
  double logit_last = 0.0;
  std::optional<boost::math::interpolators::pchip<std::vector<double>>> log_x_of_logit;

  RadialSampler(int dim, double r_param) : n(dim), r(r_param) {
    const double log_b = numerics::log_beta(n, r);
    auto density = [&](double x) {
      return std::exp((n - 1) * std::log(x) - (n + r) * std::log1p(x) - log_b);
    };
    x_first = std::pow(10.0, -std::min(6.0, 30.0 / n));
    x_last = std::min(1e8, std::max(10.0, std::pow(10.0, 40.0 / r)));

    std::vector<double> xs(kNodes);
    const double lx0 = std::log(x_first);
    const double step = (std::log(x_last) - lx0) / static_cast<double>(kNodes - 1);
    for (std::size_t j = 0; j < kNodes; ++j) xs[j] = std::exp(lx0 + step * static_cast<double>(j));
    xs.back() = x_last;

    using GL = boost::math::quadrature::gauss<double, 20>;
    std::vector<double> pieces(kNodes - 1);
    for (std::size_t j = 0; j + 1 < kNodes; ++j) pieces[j] = GL::integrate(density, xs[j], xs[j + 1]);
    const double head = GL::integrate(density, 0.0, x_first);
    // Tail beyond x_last: integrate in u = 1/x, where the integrand is smooth.
    const double tail = GL::integrate(
        [&](double u) { return u <= 0.0 ? 0.0 : density(1.0 / u) / (u * u); }, 0.0, 1.0 / x_last);

    std::vector<double> cdf(kNodes), survival(kNodes);
    cdf[0] = head;
    for (std::size_t j = 1; j < kNodes; ++j) cdf[j] = cdf[j - 1] + pieces[j - 1];
    survival[kNodes - 1] = tail;
    for (std::size_t j = kNodes - 1; j-- > 0;) survival[j] = survival[j + 1] + pieces[j];
    // Renormalize against the quadrature total so F + S = 1 at every node.
    const double total = cdf.back() + tail;
    std::vector<double> logits(kNodes), log_xs(kNodes);
    for (std::size_t j = 0; j < kNodes; ++j) {
      logits[j] = std::log(cdf[j] / total) - std::log(survival[j] / total);
      log_xs[j] = std::log(xs[j]);
    }
    cdf_first = cdf.front() / total;
    survival_last = survival.back() / total;
    logit_first = logits.front();
    logit_last = logits.back();
    log_x_of_logit.emplace(std::move(logits), std::move(log_xs));
  }

  double quantile(double u) const {
    if (u <= cdf_first) return x_first * std::pow(u / cdf_first, 1.0 / n);
    const double v = 1.0 - u;
    if (v <= survival_last) return x_last * std::pow(v / survival_last, -1.0 / r);
    const double logit = std::log(u) - std::log1p(-u);
    return std::exp((*log_x_of_logit)(std::clamp(logit, logit_first, logit_last)));
  }
};

}  // namespace detail

namespace {

constexpr double kPi = std::numbers::pi;

bool family_log_concave(Family f) {
  return f == Family::gaussian || f == Family::laplace_product || f == Family::uniform_ball;
}

bool family_radial(Family f) { return f != Family::laplace_product; }

void require_radial(const DistributionSpec& spec, const char* what) {
  if (!spec.radial()) {
    throw std::invalid_argument(std::string(what) + ": family " +
                                std::string(to_string(spec.family())) + " is not radial");
  }
}

double compute_log_normalizer(Family family, int n, double r, double s) {
  switch (family) {
    case Family::gaussian:
      return 0.5 * n * std::log(2.0 * kPi * s * s);
    case Family::radial_pareto:
    case Family::pareto_1d:
      return n * std::log(s) + numerics::log_sphere_area(n) + numerics::log_beta(n, r);
    case Family::student_t:
      return n * std::log(s * std::sqrt(r)) - std::log(2.0) + numerics::log_sphere_area(n) +
             numerics::log_beta(0.5 * n, 0.5 * r);
    case Family::laplace_product:
      return n * std::log(2.0 * s);
    case Family::uniform_ball:
      return numerics::log_ball_volume(n) + n * std::log(s);
  }
  return 0.0;
}

// log h(rho) with h(0) = 1 (unnormalized radial profile).
double log_unnormalized_profile(const DistributionSpec& spec, double rho) {
  const double s = spec.scale();
  const double r = spec.r();
  const int n = spec.dim();
  switch (spec.family()) {
    case Family::gaussian:
      return -0.5 * (rho / s) * (rho / s);
    case Family::radial_pareto:
    case Family::pareto_1d:
      return -(n + r) * std::log1p(rho / s);
    case Family::student_t:
      return -0.5 * (r + n) * std::log1p((rho / s) * (rho / s) / r);
    case Family::uniform_ball:
      return rho <= s ? 0.0 : -std::numeric_limits<double>::infinity();
    case Family::laplace_product:
      break;
  }
  throw std::invalid_argument("radial profile: family is not radial");
}

// Breakpoints for radial integrals: a geometric ladder (ratio 4) around the scale.
std::vector<double> radial_breaks(const DistributionSpec& spec) {
  std::vector<double> cuts;
  const double s = spec.scale();
  for (int k = -4; k <= 12; k += 2) cuts.push_back(s * std::ldexp(1.0, k));
  return cuts;
}

// Integral over (0, upper) of f; the first piece uses tanh-sinh so that
// integrable singularities at 0 (negative moments) are handled.
double radial_integral(const DistributionSpec& spec, const numerics::Integrand& f, double rel_tol,
                       double upper = std::numeric_limits<double>::infinity()) {
  const auto cuts = radial_breaks(spec);
  const double first = std::min(cuts.front(), upper);
  double total = numerics::integrate_endpoint_singular(f, 0.0, first, rel_tol);
  std::vector<double> interior(cuts.begin() + 1, cuts.end());
  if (upper > first) {
    if (std::isinf(upper)) {
      const double last = interior.back();
      interior.pop_back();
      total += numerics::integrate(f, first, last, rel_tol, interior);
      total += numerics::integrate_endpoint_singular(f, last, upper, rel_tol);
    } else {
      total += numerics::integrate(f, first, upper, rel_tol, interior);
    }
  }
  return total;
}

void fill_direction(Engine& engine, std::normal_distribution<double>& normal, double* out, int n) {
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (int k = 0; k < n; ++k) {
      out[k] = normal(engine);
      norm2 += out[k] * out[k];
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (int k = 0; k < n; ++k) out[k] *= inv;
}

void fill_chunk(const DistributionSpec& spec, std::uint64_t sub_seed, double* out, std::size_t rows) {
  Engine engine(sub_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = spec.dim();
  const double s = spec.scale();
  switch (spec.family()) {
    case Family::gaussian:
      for (std::size_t i = 0; i < rows * n; ++i) out[i] = s * normal(engine);
      return;
    case Family::laplace_product:
      for (std::size_t i = 0; i < rows * n; ++i) {
        const double e = -std::log(uniform_open(engine));
        out[i] = (engine() >> 63) != 0 ? s * e : -s * e;
      }
      return;
    case Family::student_t: {
      std::gamma_distribution<double> gamma(0.5 * spec.r(), 2.0);
      for (std::size_t i = 0; i < rows; ++i) {
        double* row = out + i * n;
        for (int k = 0; k < n; ++k) row[k] = normal(engine);
        const double w = s / std::sqrt(gamma(engine) / spec.r());
        for (int k = 0; k < n; ++k) row[k] *= w;
      }
      return;
    }
    case Family::uniform_ball:
      for (std::size_t i = 0; i < rows; ++i) {
        double* row = out + i * n;
        fill_direction(engine, normal, row, n);
        const double rho = s * std::pow(uniform_open(engine), 1.0 / n);
        for (int k = 0; k < n; ++k) row[k] *= rho;
      }
      return;
    case Family::radial_pareto:
    case Family::pareto_1d: {
      const auto& sampler = *spec.radial_sampler();
      for (std::size_t i = 0; i < rows; ++i) {
        double* row = out + i * n;
        fill_direction(engine, normal, row, n);
        const double rho = s * sampler.quantile(uniform_open(engine));
        for (int k = 0; k < n; ++k) row[k] *= rho;
      }
      return;
    }
  }
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::gaussian: return "gaussian";
    case Family::radial_pareto: return "radial_pareto";
    case Family::student_t: return "student_t";
    case Family::laplace_product: return "laplace_product";
    case Family::uniform_ball: return "uniform_ball";
    case Family::pareto_1d: return "pareto_1d";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::gaussian, Family::radial_pareto, Family::student_t,
                   Family::laplace_product, Family::uniform_ball, Family::pareto_1d}) {
    if (to_string(f) == name) return f;
  }
  throw std::invalid_argument("unknown family '" + std::string(name) + "'");
}

bool DistributionSpec::log_concave() const noexcept { return family_log_concave(family_); }

bool DistributionSpec::radial() const noexcept { return family_radial(family_); }

bool DistributionSpec::isotropic() const noexcept {
  if (!log_concave() && !(r_ > 2.0)) return false;
  const double target = isotropic_scale(family_, dim_, r_);
  return std::abs(scale_ - target) <= 1e-12 * target;
}

double isotropic_scale(Family family, int dim, double r) {
  if (!family_log_concave(family) && !(r > 2.0)) {
    throw HypothesisError("no finite second moment: isotropic normalization requires r > 2");
  }
  const double n = dim;
  switch (family) {
    case Family::gaussian: return 1.0;
    case Family::laplace_product: return 1.0 / std::sqrt(2.0);
    case Family::uniform_ball: return std::sqrt(n + 2.0);
    case Family::radial_pareto:
    case Family::pareto_1d: return std::sqrt((r - 1.0) * (r - 2.0) / (n + 1.0));
    case Family::student_t: return std::sqrt((r - 2.0) / r);
  }
  return 1.0;
}

DistributionSpec make_distribution_with_scale(Family family, int dim, double r, double scale) {
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  if (family == Family::pareto_1d && dim != 1) {
    throw std::invalid_argument("pareto_1d requires dim = 1");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("scale must be positive");
  DistributionSpec spec;
  spec.family_ = family;
  spec.dim_ = dim;
  spec.scale_ = scale;
  if (family_log_concave(family)) {
    spec.r_ = kLogConcave;
  } else {
    if (!(r > 1.0) || !std::isfinite(r)) {
      throw HypothesisError("concavity parameter requires finite r > 1");
    }
    spec.r_ = r;
  }
  spec.log_normalizer_ = compute_log_normalizer(family, dim, spec.r_, scale);
  if (family == Family::radial_pareto || family == Family::pareto_1d) {
    spec.sampler_ = std::make_shared<const detail::RadialSampler>(dim, spec.r_);
  }
  if (family == Family::student_t) {
    // r = nu is the claimed concavity parameter; certify it before use.
    LineGrid grid;
    grid.lines = 16;
    grid.points_per_line = 65;
    const auto cert = borell_convexity_check(spec, grid);
    if (!cert.pass) {
      throw HypothesisError("student_t: Borell convexity certificate failed for r = nu");
    }
  }
  return spec;
}

DistributionSpec make_distribution(Family family, int dim, double r, bool normalize) {
  if (!family_log_concave(family) && !(r > 1.0)) {
    throw HypothesisError("concavity parameter requires r > 1");
  }
  const double scale = normalize ? isotropic_scale(family, dim, r) : 1.0;
  return make_distribution_with_scale(family, dim, r, scale);
}

nlohmann::json to_json(const DistributionSpec& spec) {
  nlohmann::json j;
  j["family"] = std::string(to_string(spec.family()));
  j["dim"] = spec.dim();
  if (std::isinf(spec.r())) {
    j["r"] = "inf";
  } else {
    j["r"] = spec.r();
  }
  j["scale"] = spec.scale();
  return j;
}

DistributionSpec spec_from_json(const nlohmann::json& j) {
  const Family family = parse_family(j.at("family").get<std::string>());
  const int dim = j.at("dim").get<int>();
  double r = kLogConcave;
  if (j.contains("r")) {
    const auto& jr = j.at("r");
    if (jr.is_string()) {
      if (jr.get<std::string>() != "inf") throw std::invalid_argument("r must be a number or \"inf\"");
    } else {
      r = jr.get<double>();
    }
  }
  if (j.contains("scale")) return make_distribution_with_scale(family, dim, r, j.at("scale").get<double>());
  return make_distribution(family, dim, r, j.value("normalize", false));
}

double log_radial_profile(const DistributionSpec& spec, double radius) {
  require_radial(spec, "log_radial_profile");
  return log_unnormalized_profile(spec, radius) - spec.log_normalizer();
}

double density_log(const DistributionSpec& spec, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(spec.dim())) {
    throw std::invalid_argument("density_log: point dimension mismatch");
  }
  if (spec.family() == Family::laplace_product) {
    double l1 = 0.0;
    for (double v : x) l1 += std::abs(v);
    return -l1 / spec.scale() - spec.log_normalizer();
  }
  double norm2 = 0.0;
  for (double v : x) norm2 += v * v;
  return log_radial_profile(spec, std::sqrt(norm2));
}

namespace {

// log of the density of |X| at radius > 0.
double log_radial_density(const DistributionSpec& spec, double radius) {
  const int n = spec.dim();
  const double lp = log_radial_profile(spec, radius);
  if (n == 1) return std::log(2.0) + lp;
  return numerics::log_sphere_area(n) + (n - 1) * std::log(radius) + lp;
}

}  // namespace

double radial_density(const DistributionSpec& spec, double radius) {
  require_radial(spec, "radial_density");
  if (radius < 0.0) return 0.0;
  if (radius == 0.0 && spec.dim() > 1) return 0.0;
  return std::exp(log_radial_density(spec, radius));
}

double radial_cdf(const DistributionSpec& spec, double radius) {
  if (radius <= 0.0) return 0.0;
  const double n = spec.dim();
  const double r = spec.r();
  const double x = radius / spec.scale();
  switch (spec.family()) {
    case Family::gaussian:
      return boost::math::gamma_p(0.5 * n, 0.5 * x * x);
    case Family::radial_pareto:
    case Family::pareto_1d:
      return boost::math::ibeta(n, r, x / (1.0 + x));
    case Family::student_t: {
      const double y = x * x / r;
      return boost::math::ibeta(0.5 * n, 0.5 * r, y / (1.0 + y));
    }
    case Family::uniform_ball:
      return x >= 1.0 ? 1.0 : std::pow(x, n);
    case Family::laplace_product:
      if (spec.dim() == 1) return -std::expm1(-x);
      break;
  }
  throw std::invalid_argument("radial_cdf: no closed form for laplace_product with dim > 1");
}

double radial_moment_oracle(const DistributionSpec& spec, double p) {
  const double n = spec.dim();
  const double r = spec.r();
  if (!(p > -n)) throw HypothesisError("moment requires p > -n");
  if (std::isfinite(r) && !(p < r)) throw HypothesisError("moment diverges (Borell): requires p < r");
  const double sp = std::pow(spec.scale(), p);
  switch (spec.family()) {
    case Family::gaussian:
      return sp * std::exp(0.5 * p * std::log(2.0) + std::lgamma(0.5 * (n + p)) - std::lgamma(0.5 * n));
    case Family::radial_pareto:
    case Family::pareto_1d:
      return sp * std::exp(numerics::log_beta(n + p, r - p) - numerics::log_beta(n, r));
    case Family::student_t:
      return sp * std::pow(r, 0.5 * p) *
             std::exp(numerics::log_beta(0.5 * (n + p), 0.5 * (r - p)) -
                      numerics::log_beta(0.5 * n, 0.5 * r));
    case Family::uniform_ball:
      return sp * n / (n + p);
    case Family::laplace_product:
      if (spec.dim() == 1) return sp * std::tgamma(p + 1.0);
      if (p == 2.0) return 2.0 * n * spec.scale() * spec.scale();
      if (p == 0.0) return 1.0;
      break;
  }
  throw std::invalid_argument("radial_moment_oracle: laplace_product has no closed form for this (n, p)");
}

double radial_moment_quadrature(const DistributionSpec& spec, double p, double rel_tol) {
  require_radial(spec, "radial_moment_quadrature");
  const double n = spec.dim();
  if (!(p > -n)) throw HypothesisError("moment requires p > -n");
  if (std::isfinite(spec.r()) && !(p < spec.r())) {
    throw HypothesisError("moment diverges (Borell): requires p < r");
  }
  const auto integrand = [&](double rho) {
    if (rho <= 0.0 || std::isinf(rho)) return 0.0;
    return std::exp(p * std::log(rho) + log_radial_density(spec, rho));
  };
  const double upper = spec.family() == Family::uniform_ball ? spec.scale()
                                                             : std::numeric_limits<double>::infinity();
  return radial_integral(spec, integrand, rel_tol, upper);
}

double marginal_density_at_radius(const DistributionSpec& spec, int m, double radius) {
  if (!spec.radial()) throw std::invalid_argument("marginal oracle unavailable for non-radial families");
  if (m < 1 || m > 2) throw std::invalid_argument("marginal_density: m must be 1 or 2");
  if (m >= spec.dim()) throw std::invalid_argument("marginal_density: requires m < n");
  const int k = spec.dim() - m;
  const double a = std::abs(radius);
  double upper = std::numeric_limits<double>::infinity();
  if (spec.family() == Family::uniform_ball) {
    if (a >= spec.scale()) return 0.0;
    upper = std::sqrt(spec.scale() * spec.scale() - a * a);
  }
  const double log_area = numerics::log_sphere_area(k);
  const auto integrand = [&](double rho) {
    if (rho <= 0.0 && k > 1) return 0.0;
    const double lp = log_radial_profile(spec, std::hypot(a, rho));
    return std::exp(log_area + (k - 1) * std::log(std::max(rho, 1e-300)) + lp);
  };
  return radial_integral(spec, integrand, 1e-11, upper);
}

double marginal_density(const DistributionSpec& spec, int m, std::span<const double> u) {
  if (u.size() != static_cast<std::size_t>(m)) {
    throw std::invalid_argument("marginal_density: point must have m coordinates");
  }
  double norm2 = 0.0;
  for (double v : u) norm2 += v * v;
  return marginal_density_at_radius(spec, m, std::sqrt(norm2));
}

ConcavityParams concavity_params(const DistributionSpec& spec) {
  ConcavityParams out;
  out.r = spec.r();
  if (std::isinf(spec.r())) {
    out.kappa = 0.0;
  } else {
    out.kappa = -1.0 / spec.r();
    out.beta = spec.dim() + spec.r();
  }
  return out;
}

BorellCertificate borell_convexity_check(const DistributionSpec& spec, const LineGrid& grid,
                                         std::optional<double> claimed_r) {
  const double r = claimed_r.value_or(spec.r());
  if (!std::isfinite(r) || !(r > 0.0)) {
    throw HypothesisError("Borell convexity check requires a finite r");
  }
  if (grid.lines < 1 || grid.points_per_line < 3) {
    throw std::invalid_argument("line grid needs at least one line of three points");
  }
  const int n = spec.dim();
  const double beta = n + r;
  const double half = grid.half_width > 0.0
                          ? grid.half_width
                          : 4.0 * spec.scale() * (1.0 + std::sqrt(static_cast<double>(n)));
  BorellCertificate cert;
  cert.claimed_r = r;
  cert.pass = true;

  Engine engine(derive_seed(grid.seed, 0));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> base(n), dir(n), x(n), values(grid.points_per_line);
  const double h = 2.0 * half / (grid.points_per_line - 1);
  for (int line = 0; line < grid.lines; ++line) {
    fill_direction(engine, normal, base.data(), n);
    const double offset = 0.5 * half * uniform_open(engine);
    for (auto& v : base) v *= offset;
    fill_direction(engine, normal, dir.data(), n);
    for (int j = 0; j < grid.points_per_line; ++j) {
      const double t = -half + h * j;
      for (int k = 0; k < n; ++k) x[k] = base[k] + t * dir[k];
      values[j] = std::exp(-density_log(spec, x) / beta);
    }
    for (int j = 1; j + 1 < grid.points_per_line; ++j) {
      const double a = values[j - 1], b = values[j], c = values[j + 1];
      if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) continue;
      ++cert.triples_checked;
      const double second = a - 2.0 * b + c;
      const double local = std::max({std::abs(a), std::abs(b), std::abs(c)});
      if (second < -1e-9 * local) {
        cert.pass = false;
        if (!cert.first_violation) {
          ConvexityViolation v;
          const double t = -half + h * j;
          v.point.resize(n);
          for (int k = 0; k < n; ++k) v.point[k] = base[k] + t * dir[k];
          v.direction = dir;
          v.step = h;
          v.second_difference = second;
          v.local_scale = local;
          cert.first_violation = std::move(v);
        }
      }
    }
  }
  return cert;
}

std::vector<ChunkInfo> default_chunk_layout(std::uint64_t seed, std::size_t count,
                                            std::size_t chunk_size) {
  if (chunk_size == 0) throw std::invalid_argument("chunk size must be positive");
  std::vector<ChunkInfo> layout;
  for (std::size_t start = 0, i = 0; start < count; start += chunk_size, ++i) {
    layout.push_back({derive_seed(seed, i), std::min(chunk_size, count - start)});
  }
  return layout;
}

SampleBatch::SampleBatch(DistributionSpec spec, std::uint64_t seed, std::vector<ChunkInfo> layout,
                         std::vector<double> data)
    : spec_(std::move(spec)), seed_(seed), layout_(std::move(layout)), data_(std::move(data)) {
  const auto n = static_cast<std::size_t>(spec_.dim());
  if (data_.size() % n != 0) throw std::invalid_argument("sample data is not a whole number of rows");
  count_ = data_.size() / n;
  std::size_t laid_out = 0;
  for (const auto& c : layout_) laid_out += c.size;
  if (laid_out != count_) throw std::invalid_argument("chunk layout does not match the row count");
  norms_.resize(count_);
  for (std::size_t i = 0; i < count_; ++i) {
    double s2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) s2 += data_[i * n + k] * data_[i * n + k];
    norms_[i] = std::sqrt(s2);
  }
}

SampleBatch SampleBatch::from_rows(DistributionSpec spec, std::vector<double> rows) {
  const std::size_t count = rows.size() / static_cast<std::size_t>(spec.dim());
  return SampleBatch(std::move(spec), 0, {{0, count}}, std::move(rows));
}

std::span<const double> SampleBatch::row(std::size_t i) const {
  const auto n = static_cast<std::size_t>(spec_.dim());
  return std::span<const double>(data_).subspan(i * n, n);
}

SampleBatch sample(const DistributionSpec& spec, std::uint64_t seed, std::size_t count) {
  if (count < 1) throw std::invalid_argument("sample: count must be >= 1");
  return sample(spec, seed, default_chunk_layout(seed, count));
}

SampleBatch sample(const DistributionSpec& spec, std::uint64_t seed,
                   const std::vector<ChunkInfo>& layout) {
  const auto n = static_cast<std::size_t>(spec.dim());
  std::vector<std::size_t> offsets(layout.size() + 1, 0);
  for (std::size_t i = 0; i < layout.size(); ++i) offsets[i + 1] = offsets[i] + layout[i].size;
  std::vector<double> data(offsets.back() * n);
  parallel_for(layout.size(), [&](std::size_t i) {
    fill_chunk(spec, layout[i].sub_seed, data.data() + offsets[i] * n, layout[i].size);
  });
  return SampleBatch(spec, seed, layout, std::move(data));
}

}  // namespace convexmoments
