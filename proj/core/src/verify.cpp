#include "convexmoments/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "convexmoments/constants.hpp"
#include "convexmoments/errors.hpp"
#include "convexmoments/estimators.hpp"
#include "convexmoments/geometry.hpp"
#include "convexmoments/numerics.hpp"
#include "convexmoments/parallel.hpp"
#include "convexmoments/rng.hpp"

namespace convexmoments::verify {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Grid points with fewer exceedances than this are not resolvable.
constexpr double kMinCount = 50.0;

nlohmann::json real(double x) {
  if (std::isfinite(x)) return x;
  return x > 0 ? "inf" : "-inf";
}

double effective_r(const DistributionSpec& spec, std::optional<double> claimed_r) {
  if (!claimed_r) return spec.r();
  if (*claimed_r > spec.r()) throw HypothesisError("claimed r exceeds the concavity parameter of the spec");
  return *claimed_r;
}

nlohmann::json base_params(const DistributionSpec& spec) {
  nlohmann::json j;
  j["spec"] = to_json(spec);
  return j;
}

// E|PX|^q for a radial X and a rank-m coordinate projection P: |PX| is |X|
// times an independent projected uniform direction.
double projected_moment(const DistributionSpec& spec, int m, double q) {
  const double n = spec.dim();
  const double sphere = std::lgamma(0.5 * n) + std::lgamma(0.5 * (m + q)) - std::lgamma(0.5 * m) - std::lgamma(0.5 * (n + q));
  return radial_moment_oracle(spec, q) * std::exp(sphere);
}

// Runs `attempt` for each budget in kBudgetSweep and keeps the first one at
// which every returned ratio is <= 1 (or the last one if none passes).
void sweep_budgets(CheckReport& rep, const std::function<std::vector<double>(double, nlohmann::json&)>& attempt) {
  nlohmann::json sweep = nlohmann::json::array();
  std::vector<double> chosen;
  nlohmann::json chosen_detail;
  double chosen_budget = kBudgetSweep.back();
  for (double budget : kBudgetSweep) {
    nlohmann::json detail = nlohmann::json::object();
    const auto ratios = attempt(budget, detail);
    const double worst = ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end());
    sweep.push_back({{"budget", budget}, {"worst_ratio", worst}});
    chosen = ratios;
    chosen_detail = detail;
    chosen_budget = budget;
    if (worst <= 1.0) break;
  }
  rep.budget = chosen_budget;
  rep.observed["budget_sweep"] = sweep;
  rep.observed["smallest_passing_budget"] = chosen_budget;
  rep.observed["instances"] = chosen_detail;
  for (double x : chosen) rep.record(x, x);
}

// Rows of a k x n matrix with orthonormal rows, Gram-Schmidt on Gaussians.
std::vector<std::vector<double>> random_frame(int k, int n, std::uint64_t seed) {
  Engine eng(seed);
  std::normal_distribution<double> normal;
  std::vector<std::vector<double>> rows;
  while (static_cast<int>(rows.size()) < k) {
    std::vector<double> v(n);
    for (double& x : v) x = normal(eng);
    for (const auto& u : rows) {
      double d = 0.0;
      for (int i = 0; i < n; ++i) d += u[i] * v[i];
      for (int i = 0; i < n; ++i) v[i] -= d * u[i];
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm < 1e-8) continue;
    for (double& x : v) x /= norm;
    rows.push_back(std::move(v));
  }
  return rows;
}

std::vector<double> projected_norms(const SampleBatch& batch, const std::vector<std::vector<double>>& frame) {
  std::vector<double> out(batch.count());
  for (std::size_t i = 0; i < batch.count(); ++i) {
    const auto x = batch.row(i);
    double s = 0.0;
    for (const auto& u : frame) {
      double d = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) d += u[j] * x[j];
      s += d * d;
    }
    out[i] = std::sqrt(s);
  }
  return out;
}

double counts_of(const MomentEstimate& e) { return e.value * static_cast<double>(e.n_samples); }

}  // namespace

std::size_t capped_samples(std::size_t requested, int dim) {
  return std::min(requested, kMaxBatchDoubles / static_cast<std::size_t>(std::max(dim, 1)));
}

CheckReport strong_weak(const DistributionSpec& spec, double p, std::size_t n_samples, std::uint64_t seed,
                        double budget, std::optional<double> claimed_r) {
  const double r = effective_r(spec, claimed_r);
  if (!(p > 0.0) || !(p < r)) throw HypothesisError("strong-weak inequality requires 0 < p < r");
  CheckReport rep;
  rep.check_id = "strong-weak";
  rep.budget = budget;
  rep.params = base_params(spec);
  rep.params["p"] = p;
  rep.params["r"] = real(r);
  rep.params["n_samples"] = n_samples;
  rep.params["seed"] = seed;

  const auto batch = sample(spec, seed, n_samples);
  const auto strong = strong_moment(batch, p);
  const auto mean = strong_moment(batch, 1.0);
  const auto weak = weak_moment(batch, p);
  const double c2 = std::isinf(r) ? 1.0 : constants::c2_factor(p, r);

  const double rhs = budget * (c2 * mean.value + weak.value);
  const double rhs_low = budget * (c2 * mean.ci_low + weak.ci_low);
  rep.record(strong.value / rhs, strong.ci_high / rhs_low);

  // 2 (E|X|^p)^{1/p} >= E|X| + sigma_p holds for every X; only a violation
  // beyond the intervals counts.
  const double floor_ratio = (mean.value + weak.value) / (2.0 * strong.value);
  const double floor_best = (mean.ci_low + weak.ci_low) / (2.0 * strong.ci_high);
  if (floor_best > 1.0) rep.record_failure("reverse floor 2 (E|X|^p)^{1/p} >= E|X| + sigma_p violated");

  rep.observed["strong"] = to_json(strong);
  rep.observed["mean_norm"] = to_json(mean);
  rep.observed["weak"] = to_json(weak);
  rep.observed["c2_factor"] = c2;
  rep.observed["reverse_floor_ratio"] = floor_ratio;
  if (weak.lower_bound) {
    rep.notes.push_back("sigma_p is a lower bound from finitely many directions, which makes the bound side smaller");
  }
  rep.finalize();
  return rep;
}

CheckReport universality(Family family, double p, std::optional<double> r, const std::vector<int>& dims,
                         std::size_t n_samples, std::uint64_t seed, double budget) {
  if (dims.size() < 2) throw std::invalid_argument("universality needs at least two dimensions");
  const double r_used = make_distribution(family, dims.front(), r.value_or(2.0 * (p + 1.0)), false).r();
  // A log-concave family is checked at the r it is given, else with c2 = 1.
  const std::optional<double> claimed = std::isinf(r_used) ? r : std::nullopt;

  CheckReport rep;
  rep.check_id = "universality";
  rep.budget = budget;
  rep.params["family"] = std::string(to_string(family));
  rep.params["p"] = p;
  rep.params["r"] = real(claimed.value_or(r_used));
  rep.params["dims"] = dims;
  rep.params["n_samples"] = n_samples;
  rep.params["seed"] = seed;

  std::vector<double> logn, logratio, ratios;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const int n = dims[i];
    const auto spec = make_distribution(family, n, r_used, true);
    const std::size_t count = capped_samples(n_samples, n);
    const auto sub = strong_weak(spec, p, count, derive_seed(seed, i), budget, claimed);
    rep.record(sub.ratio, sub.ratio_upper);
    for (const auto& note : sub.notes) {
      if (sub.status == CheckStatus::fail) rep.record_failure("n=" + std::to_string(n) + ": " + note);
    }
    rep.rows.push_back({{"n", n},
                        {"n_samples", count},
                        {"ratio", sub.ratio},
                        {"ratio_upper", sub.ratio_upper},
                        {"strong", sub.observed["strong"]["value"]},
                        {"mean_norm", sub.observed["mean_norm"]["value"]},
                        {"weak", sub.observed["weak"]["value"]}});
    logn.push_back(std::log(static_cast<double>(n)));
    logratio.push_back(std::log(sub.ratio));
    ratios.push_back(sub.ratio);
  }
  const double spread = *std::max_element(ratios.begin(), ratios.end()) /
                        *std::min_element(ratios.begin(), ratios.end());
  const auto fit = numerics::least_squares(logn, logratio);
  rep.observed["spread"] = spread;
  rep.observed["log_n_slope"] = fit.slope;
  rep.observed["log_n_slope_se"] = fit.slope_se;
  // Seeded point estimates; the per-n rows already carry the interval slack.
  rep.record(spread / 3.0, spread / 3.0);
  rep.record(fit.slope / 0.1, fit.slope / 0.1);
  rep.finalize();
  return rep;
}

CheckReport assumption_h(const DistributionSpec& spec, double p, double budget, std::optional<double> claimed_r,
                         const std::vector<std::vector<double>>& projection) {
  if (!(p >= 1.0)) throw HypothesisError("assumption H is checked for p >= 1");
  const int m = static_cast<int>(std::ceil(p));
  if (m > 2) throw HypothesisError("assumption H is checked for m = ceil(p) in {1, 2}");
  if (!spec.radial()) throw HypothesisError("assumption H needs a radial spec (marginal oracle)");
  const int n = spec.dim();
  if (m > n) throw HypothesisError("m = ceil(p) exceeds the dimension");
  const double r = effective_r(spec, claimed_r);
  if (!(p < r)) throw HypothesisError("assumption H requires p < r");

  CheckReport rep;
  rep.check_id = "H";
  rep.budget = budget;
  rep.params = base_params(spec);
  rep.params["p"] = p;
  rep.params["r"] = real(r);
  rep.params["m"] = m;

  if (!projection.empty()) {
    if (static_cast<int>(projection.size()) != m) throw std::invalid_argument("projection needs m = ceil(p) rows");
    for (const auto& row : projection) {
      if (static_cast<int>(row.size()) != n) throw std::invalid_argument("projection rows need length n");
    }
    rep.params["projection"] = projection;
    const auto dot = [&](int a, int b) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += projection[a][i] * projection[b][i];
      return s;
    };
    const double gram = m == 1 ? dot(0, 0) : dot(0, 0) * dot(1, 1) - dot(0, 1) * dot(0, 1);
    double scale = 1.0;
    for (int a = 0; a < m; ++a) scale *= dot(a, a);
    if (!(gram > 1e-12 * scale) || scale == 0.0) {
      rep.notes.push_back("degenerate, vacuously satisfied: Y = AX lies in a proper subspace");
      rep.finalize();
      return rep;
    }
    // The ratio is unchanged under invertible linear maps of Y, since
    // K_alpha(g_{LY}) = L K_alpha(g_Y).
    rep.notes.push_back("non-degenerate projection reduced to the coordinate marginal by affine invariance");
  }

  const std::function<double(double)> profile = [&spec, m, n](double rho) {
    if (m == n) return std::exp(log_radial_profile(spec, rho));
    return marginal_density_at_radius(spec, m, rho);
  };
  const double alpha = std::exp(constants::log_alpha_factor(p, r, m, 1.0));
  const double s = spec.scale();
  double moment_p = 0.0, moment_1 = 0.0;
  nlohmann::json body_json;
  if (m == 1) {
    const auto body = geometry::level_set_1d([&](double t) { return profile(std::abs(t)); }, alpha, 50.0 * s);
    // Y is symmetric, so each half-line carries half of E|Y|^q.
    moment_p = 0.5 * projected_moment(spec, m, p) * (std::pow(body.b, -p) + std::pow(-body.a, -p));
    moment_1 = 0.5 * projected_moment(spec, m, 1.0) * (1.0 / body.b + 1.0 / (-body.a));
    body_json = geometry::to_json(body);
    rep.observed["origin_inside"] = body.contains_origin;
  } else {
    const auto body = geometry::level_set_2d(
        [&](double x, double y) { return profile(std::hypot(x, y)); }, alpha, 360, 20.0 * s);
    const double h = 2.0 * std::numbers::pi / static_cast<double>(body.ray_angles.size());
    double ang_p = 0.0, ang_1 = 0.0;
    for (double th : body.ray_angles) {
      const double e[2] = {std::cos(th), std::sin(th)};
      const double g = geometry::gauge_eval(body, e);
      ang_p += h * std::pow(g, p);
      ang_1 += h * g;
    }
    // The direction of Y is uniform and independent of |Y|.
    moment_p = ang_p / (2.0 * std::numbers::pi) * projected_moment(spec, m, p);
    moment_1 = ang_1 / (2.0 * std::numbers::pi) * projected_moment(spec, m, 1.0);
    body_json = {{"alpha", body.alpha}, {"area", body.volume()}, {"rays", body.ray_angles.size()}};
    rep.observed["origin_inside"] = body.contains_origin;
  }
  const double lambda = constants::c2_factor(p, r);
  const double moment_ratio = std::pow(moment_p, 1.0 / p) / moment_1;
  rep.observed["alpha"] = alpha;
  rep.observed["lambda_factor"] = lambda;
  rep.observed["moment_ratio"] = moment_ratio;
  rep.observed["body"] = body_json;
  const double ratio = moment_ratio / (budget * lambda);
  rep.record(ratio, ratio);
  if (!rep.observed["origin_inside"].get<bool>()) rep.record_failure("origin outside K_alpha");
  rep.finalize();
  return rep;
}

CheckReport tail(const DistributionSpec& spec, const std::vector<double>& t_grid, std::size_t n_samples,
                 std::uint64_t seed, const TailBudgets& budgets, std::optional<double> claimed_r) {
  const double r = effective_r(spec, claimed_r);
  if (!(r > 2.0)) throw HypothesisError("tail bound requires r > 2");
  if (std::isinf(r)) throw HypothesisError("tail bound needs a finite r; pass the r claimed for a log-concave spec");
  if (!spec.isotropic()) throw HypothesisError("tail bound requires an isotropic spec");
  const int n = spec.dim();
  const double sqrt_n = std::sqrt(static_cast<double>(n));

  CheckReport rep;
  rep.check_id = "tail";
  rep.budget = budgets.paouris;
  rep.params = base_params(spec);
  rep.params["r"] = r;
  rep.params["t_grid"] = t_grid;
  rep.params["n_samples"] = n_samples;
  rep.params["seed"] = seed;
  rep.params["budgets"] = {{"paouris", budgets.paouris}, {"projection", budgets.projection}};

  const auto batch = sample(spec, seed, n_samples);
  const auto& norms = batch.norms();
  std::vector<double> xs, ys, used, trimmed;
  for (double t : t_grid) {
    const auto e = tail_probability(norms, t * sqrt_n);
    if (counts_of(e) < kMinCount) {
      trimmed.push_back(t);
      continue;
    }
    used.push_back(t);
    const double bound = constants::paouris_tail(t, n, r, budgets.paouris);
    rep.record(e.value / bound, e.ci_high / bound);
    rep.rows.push_back({{"part", "tail"}, {"k", n}, {"t", t}, {"probability", e.value},
                        {"ci_high", e.ci_high}, {"bound", bound}});
    if (e.value < 1.0) {
      xs.push_back(std::log(t));
      ys.push_back(std::log(e.value));
    }
  }
  rep.observed["resolvable_t"] = used;
  rep.observed["trimmed_t"] = trimmed;

  const double target = -0.5 * r + 0.5;
  rep.observed["slope_target"] = target;
  if (xs.size() >= 3) {
    const auto fit = numerics::least_squares(xs, ys);
    const double hi = fit.slope + 2.0 * fit.slope_se;
    rep.observed["slope"] = fit.slope;
    rep.observed["slope_se"] = fit.slope_se;
    const auto as_ratio = [target](double slope) { return slope < 0.0 ? target / slope : kInf; };
    rep.record(as_ratio(fit.slope), as_ratio(hi));
  } else {
    rep.notes.push_back("slope fit skipped: fewer than three resolvable grid points");
  }

  // Strong regularity: r = 2 a log n fixes a, and the bound starts at C1(a).
  if (n >= 2 && r >= 4.0) {
    const double a = r / (2.0 * std::log(static_cast<double>(n)));
    const double t0 = constants::strong_regularity_c1(a);
    rep.observed["a"] = a;
    rep.observed["projection_t0"] = t0;
    std::vector<int> ranks = {1};
    if ((n + 1) / 2 > 1) ranks.push_back((n + 1) / 2);
    for (int k : ranks) {
      const auto frame = random_frame(k, n, derive_seed(seed, 1000 + k));
      const auto pn = projected_norms(batch, frame);
      const double sqrt_k = std::sqrt(static_cast<double>(k));
      for (double mult : {1.0, 1.25, 1.5, 2.0, 3.0, 4.0}) {
        const double t = t0 * mult;
        const auto e = tail_probability(pn, t * sqrt_k);
        if (counts_of(e) < kMinCount) continue;
        const double bound = budgets.projection * std::pow(t, -4.0) / (k * k);
        rep.record(e.value / bound, e.ci_high / bound);
        rep.rows.push_back({{"part", "projection"}, {"k", k}, {"t", t}, {"probability", e.value},
                            {"ci_high", e.ci_high}, {"bound", bound}});
      }
    }
  } else {
    rep.notes.push_back("projection part skipped: needs n >= 2 and r >= 4");
  }
  rep.finalize();
  return rep;
}

CheckReport negative(const DistributionSpec& spec, double p, std::size_t n_samples, std::uint64_t seed,
                     double budget_c, double budget_C, std::optional<double> claimed_r) {
  const double r = effective_r(spec, claimed_r);
  const int n = spec.dim();
  const bool moreover = p < 1.0;
  if (!(p > 0.0)) throw HypothesisError("negative moment bound requires p > 0");
  if (!moreover && !(p < std::min(r, 0.5 * n))) {
    throw HypothesisError("negative moment bound requires 1 <= p < min{r, n/2}");
  }
  CheckReport rep;
  rep.check_id = "negative";
  rep.budget = budget_c;
  rep.params = base_params(spec);
  rep.params["p"] = p;
  rep.params["r"] = real(r);
  rep.params["n_samples"] = n_samples;
  rep.params["seed"] = seed;
  rep.params["budgets"] = {{"c", budget_c}, {"C", budget_C}};
  rep.params["clause"] = moreover ? "p < 1" : "p >= 1";

  const auto batch = sample(spec, seed, n_samples);
  const auto neg = negative_moment(batch, p);
  const auto mean = strong_moment(batch, 1.0);
  rep.observed["negative"] = to_json(neg);
  rep.observed["mean_norm"] = to_json(mean);

  if (moreover) {
    const double factor = std::isinf(r) ? 0.0 : (1.0 - p) * (r - 1.0) / (r * r);
    rep.observed["factor"] = factor;
    if (factor == 0.0) {
      rep.notes.push_back("vacuous: the factor (r-1)/r^2 vanishes in the log-concave limit");
    } else {
      rep.record(budget_c * factor * mean.value / neg.value, budget_c * factor * mean.ci_high / neg.ci_low);
    }
  } else {
    const auto weak = weak_moment(batch, p);
    const double c4 = constants::c4_factor(p, r);
    rep.observed["weak"] = to_json(weak);
    rep.observed["c4_factor"] = c4;
    const double gap = mean.value - budget_C * weak.value;
    rep.observed["gate_gap"] = gap;
    if (gap <= 0.0) {
      rep.notes.push_back("vacuous: E|X| <= C sigma_p, so the lower bound is nonpositive");
    } else {
      const double gap_hi = mean.ci_high - budget_C * weak.ci_low;
      rep.record(budget_c * c4 * gap / neg.value, budget_c * c4 * gap_hi / neg.ci_low);
    }
  }
  rep.finalize();
  return rep;
}

CheckReport small_ball(const DistributionSpec& spec, double p, const std::vector<double>& eps_grid,
                       std::size_t n_samples, std::uint64_t seed, const SmallBallBudgets& budgets,
                       std::optional<double> claimed_r) {
  const double r = effective_r(spec, claimed_r);
  const int n = spec.dim();
  if (!(p >= 1.0) || !(p < std::min(r, 0.5 * n))) {
    throw HypothesisError("small-ball bound requires 1 <= p < min{r, n/2}");
  }
  CheckReport rep;
  rep.check_id = "smallball";
  rep.budget = budgets.bound;
  rep.params = base_params(spec);
  rep.params["p"] = p;
  rep.params["r"] = real(r);
  rep.params["eps_grid"] = eps_grid;
  rep.params["n_samples"] = n_samples;
  rep.params["seed"] = seed;
  rep.params["budgets"] = {{"bound", budgets.bound}, {"gate", budgets.gate}, {"exponent", budgets.exponent}};

  const auto batch = sample(spec, seed, n_samples);
  const double location = small_ball_location(spec, derive_seed(seed, 1));
  const auto weak = weak_moment(batch, p);
  const double c4 = constants::c4_factor(p, r);
  rep.observed["location"] = location;
  rep.observed["weak"] = to_json(weak);
  rep.observed["c4_factor"] = c4;
  const bool gate = location >= 2.0 * budgets.gate * weak.ci_high;
  rep.observed["gate"] = gate;
  if (!gate) {
    rep.notes.push_back("vacuous: gate E|X| >= 2 C sigma_p fails at the given C");
    rep.finalize();
    return rep;
  }

  const bool exact = spec.family() == Family::gaussian;
  int unresolved = 0;
  std::vector<double> xs, ys;
  for (double eps : eps_grid) {
    if (eps < 0.0 || eps >= 1.0) throw std::invalid_argument("eps must lie in [0, 1)");
    const auto e = small_ball_probability(batch, eps, location);
    const double bound = std::pow(2.0 * budgets.bound * eps / c4, p);
    nlohmann::json row = {{"eps", eps}, {"probability", e.value}, {"ci_high", e.ci_high}, {"bound", bound}};
    if (exact) {
      const double truth = radial_cdf(spec, eps * location);
      row["exact"] = truth;
      if (std::abs(e.value - truth) > 1e-3) {
        rep.record_failure("eps=" + std::to_string(eps) + ": empirical small-ball probability off the chi oracle by > 1e-3");
      }
      if (eps == 0.0) {
        rep.record(0.0, 0.0);
      } else {
        rep.record(truth / bound, truth / bound);
      }
    } else if (eps == 0.0) {
      rep.record(0.0, 0.0);
    } else if (counts_of(e) == 0 && e.ci_high > bound) {
      // Zero hits cannot resolve a bound this small.
      row["unresolved"] = true;
      ++unresolved;
    } else {
      rep.record(e.value / bound, e.ci_high / bound);
    }
    if (eps > 0.0 && counts_of(e) >= kMinCount) {
      xs.push_back(std::log(eps));
      ys.push_back(std::log(e.value));
    }
    rep.rows.push_back(row);
  }
  if (unresolved > 0) rep.notes.push_back(std::to_string(unresolved) + " eps below Monte Carlo resolution skipped");
  if (spec.log_concave() && !claimed_r) {
    if (xs.size() >= 2) {
      const auto fit = numerics::least_squares(xs, ys);
      const double need = budgets.exponent * std::sqrt(static_cast<double>(n));
      rep.observed["eps_exponent"] = fit.slope;
      rep.observed["eps_exponent_se"] = fit.slope_se;
      rep.observed["eps_exponent_target"] = need;
      const double low = fit.slope - 2.0 * fit.slope_se;
      rep.record(need / fit.slope, low > 0.0 ? need / low : kInf);
    } else {
      rep.notes.push_back("exponent fit skipped: fewer than two resolvable eps");
    }
  }
  rep.finalize();
  return rep;
}

CheckReport borell_1d(double r, const std::set<int>& lemmas, const BorellBudgets& budgets, std::vector<double> q_grid,
                      std::vector<double> t_grid, std::vector<double> eps_grid) {
  if (!(r > 1.0)) throw HypothesisError("requires r > 1");
  for (int l : lemmas) {
    if (l < 13 || l > 15) throw std::invalid_argument("lemmas are 13, 14 and 15");
  }
  if (q_grid.empty()) {
    for (double q = 1.0; q < r - 0.5; q += 1.0) q_grid.push_back(q);
    for (double gap : {0.5, 0.1, 0.01}) {
      if (r - gap >= 1.0) q_grid.push_back(r - gap);
    }
  }
  if (t_grid.empty()) t_grid = {1.0, 1.5, 2.0, 4.0, 8.0, 16.0, 64.0, 256.0};
  if (eps_grid.empty()) eps_grid = {1e-3, 0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.99};
  for (double q : q_grid) {
    if (!(q >= 1.0) || !(q < r)) throw HypothesisError("moment orders must satisfy 1 <= q < r");
  }

  CheckReport rep;
  rep.check_id = lemmas.size() == 1 ? "lemma" + std::to_string(*lemmas.begin()) : "borell-1d";
  rep.params["family"] = "pareto_1d";
  rep.params["r"] = r;
  rep.params["lemmas"] = lemmas;
  rep.params["q_grid"] = q_grid;
  rep.params["t_grid"] = t_grid;
  rep.params["eps_grid"] = eps_grid;
  rep.params["budgets"] = {{"lemma13", budgets.lemma13}, {"lemma14", budgets.lemma14}, {"lemma15", budgets.lemma15}};
  rep.budget = std::max({budgets.lemma13, budgets.lemma14, budgets.lemma15});

  // |X| has survival (1 + x)^{-r}.
  const auto survival = [r](double x) { return std::pow(1.0 + x, -r); };
  const auto abs_moment = [r](double q) { return std::exp(std::lgamma(q + 1.0) + std::lgamma(r - q) - std::lgamma(r)); };
  const double mean = 1.0 / (r - 1.0);
  const double med = std::exp2(1.0 / r) - 1.0;
  // Cross-check the closed forms against quadrature of the density.
  const auto density = [r](double x) { return r * std::pow(1.0 + x, -r - 1.0); };
  const double mean_quad = numerics::integrate([&](double x) { return x * density(x); }, 0.0, kInf);
  rep.observed["mean"] = mean;
  rep.observed["median"] = med;
  rep.observed["mean_quadrature_gap"] = std::abs(mean_quad - mean) / mean;
  if (std::abs(mean_quad - mean) > 1e-8 * mean) rep.record_failure("closed-form mean disagrees with quadrature");

  const auto add = [&](const char* part, double x, double value, double bound) {
    rep.record(value / bound, value / bound);
    rep.rows.push_back({{"part", part}, {"x", x}, {"value", value}, {"bound", bound}});
  };
  if (lemmas.count(13)) {
    for (double t : t_grid) {
      if (t < 1.0) continue;
      add("borell_tail", t, survival(3.0 * t * mean), constants::borell_tail(t, r));
    }
    for (double q : q_grid) {
      add("moment_ratio", q, std::pow(abs_moment(q), 1.0 / q) / mean, budgets.lemma13 * constants::c1_factor(q, r));
    }
  }
  if (lemmas.count(14)) {
    for (double t : t_grid) {
      if (t < 1.0) continue;
      add("median_tail", t, survival(t * med), std::exp(r * std::log(budgets.lemma14 * r) - r * std::log(t)));
    }
    for (double q : q_grid) {
      add("moment_median", q, std::pow(abs_moment(q), 1.0 / q),
          budgets.lemma14 * r * std::pow(r / (r - q), 1.0 / q) * med);
    }
  }
  if (lemmas.count(15)) {
    for (double eps : eps_grid) {
      if (!(eps > 0.0 && eps < 1.0)) continue;
      add("median_small_ball", eps, 1.0 - survival(eps * med), budgets.lemma15 * eps);
    }
    for (double p : {0.1, 0.25, 0.5, 0.75, 0.9, 0.99}) {
      // (E|X|^{-p})^{-1/p} >= (1-p) Med / budget, written as a ratio.
      const double neg = std::pow(abs_moment(-p), -1.0 / p);
      add("negative_moment", p, (1.0 - p) * med / budgets.lemma15, neg);
    }
  }
  rep.finalize();
  return rep;
}

double sweep_r(int dim, double a) { return std::max(4.0, 2.0 * a * std::log(2.0 * dim)); }

CheckReport covariance_sweep(const DistributionSpec& spec, int k_max, int seeds, std::uint64_t seed, double budget) {
  if (!(spec.r() > 2.0)) throw HypothesisError("covariance approximation requires r > 2");
  if (!spec.isotropic()) throw HypothesisError("covariance approximation requires an isotropic spec");
  if (k_max < 3 || seeds < 1) throw std::invalid_argument("need k_max >= 3 and at least one seed");
  const int n = spec.dim();
  CheckReport rep;
  rep.check_id = "cov-sweep";
  rep.budget = budget;
  rep.params = base_params(spec);
  rep.params["k_max"] = k_max;
  rep.params["seeds"] = seeds;
  rep.params["seed"] = seed;
  if (n >= 2 && std::isfinite(spec.r())) rep.observed["a"] = spec.r() / (2.0 * std::log(static_cast<double>(n)));

  std::vector<double> xs, ys;
  for (int k = 0; k <= k_max; ++k) {
    const std::size_t count = static_cast<std::size_t>(n) << k;
    std::vector<double> devs(seeds);
    for (int s = 0; s < seeds; ++s) {
      const auto batch = sample(spec, derive_seed(seed, static_cast<std::uint64_t>(k * seeds + s)), count);
      devs[s] = covariance_deviation(batch, derive_seed(seed, 1'000'000 + s));
    }
    const double med = numerics::median(devs);
    const double scale = std::sqrt(static_cast<double>(n) / static_cast<double>(count));
    rep.rows.push_back({{"N", count}, {"median_deviation", med}, {"sqrt_n_over_N", scale}});
    // N = n is the edge of the regime: recorded only.
    if (k == 0) continue;
    rep.record(med / (budget * scale), med / (budget * scale));
    xs.push_back(std::log(static_cast<double>(count)));
    ys.push_back(std::log(med));
  }
  const auto fit = numerics::least_squares(xs, ys);
  rep.observed["slope"] = fit.slope;
  rep.observed["slope_se"] = fit.slope_se;
  const double off = std::abs(fit.slope + 0.5) / 0.15;
  rep.record(off, off);
  rep.finalize();
  return rep;
}

CheckReport thinshell(Family family, std::optional<double> r, const std::vector<int>& dims, double t,
                      std::size_t n_samples, std::uint64_t seed) {
  CheckReport rep;
  rep.check_id = "thinshell";
  rep.asserting = false;
  rep.params["family"] = std::string(to_string(family));
  if (r) rep.params["r"] = *r;
  rep.params["dims"] = dims;
  rep.params["t"] = t;
  rep.params["n_samples"] = n_samples;
  rep.params["seed"] = seed;
  std::vector<double> probs;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const int n = dims[i];
    const double r_n = r.value_or(family == Family::student_t || family == Family::radial_pareto ? sweep_r(n) : kLogConcave);
    const auto spec = make_distribution(family, n, r_n, true);
    const std::size_t count = capped_samples(n_samples, n);
    const auto batch = sample(spec, derive_seed(seed, i), count);
    double center = 0.0;
    if (spec.radial()) {
      center = radial_moment_oracle(spec, 1.0);
    } else {
      for (double x : batch.norms()) center += x;
      center /= static_cast<double>(count);
    }
    std::vector<double> dev(count);
    for (std::size_t j = 0; j < count; ++j) dev[j] = std::abs(batch.norms()[j] - center);
    const auto e = tail_probability(dev, t * std::sqrt(static_cast<double>(n)));
    probs.push_back(e.value);
    rep.rows.push_back({{"n", n}, {"r", real(r_n)}, {"n_samples", count}, {"probability", e.value},
                        {"ci_low", e.ci_low}, {"ci_high", e.ci_high}});
  }
  rep.observed["decreasing"] = std::is_sorted(probs.rbegin(), probs.rend());
  rep.notes.push_back("exploratory: no bound is asserted");
  rep.finalize();
  return rep;
}

CheckReport restriction(const DistributionSpec& spec, double p, std::optional<double> claimed_r) {
  const double r = effective_r(spec, claimed_r);
  if (std::isinf(r)) throw HypothesisError("log-concave spec: pass the r at which it is treated as (-1/r)-concave");
  CheckReport rep;
  rep.check_id = "restriction";
  rep.params = base_params(spec);
  rep.params["p"] = p;
  rep.params["r"] = real(r);
  rep.params["budget_sweep"] = kBudgetSweep;
  bool origin_always = true;
  sweep_budgets(rep, [&](double budget, nlohmann::json& detail) {
    std::vector<double> out;
    for (auto kind : {geometry::FKind::linear_power, geometry::FKind::gauge_power}) {
      const auto res = geometry::restriction_check(spec, p, kind, budget, r);
      out.push_back(res.ratio / res.bound);
      origin_always = origin_always && res.origin_inside;
      detail[std::string(geometry::to_string(kind))] = {
          {"alpha", res.alpha}, {"ratio", res.ratio}, {"bound", res.bound}, {"origin_inside", res.origin_inside}};
      if (spec.dim() == 1) {
        const auto tilted = geometry::make_borell_density_1d(
            [](double x) { return 1.0 + std::abs(x) + 0.5 * x; }, 1.0 + r, {0.0}, true);
        const auto t = geometry::restriction_check(tilted, r, p, kind, budget);
        out.push_back(t.ratio / t.bound);
        origin_always = origin_always && t.origin_inside;
        detail[std::string(geometry::to_string(kind)) + "_tilted"] = {
            {"alpha", t.alpha}, {"ratio", t.ratio}, {"bound", t.bound}, {"origin_inside", t.origin_inside}};
      }
    }
    return out;
  });
  if (!origin_always) rep.record_failure("origin outside K_alpha in some instance");
  rep.finalize();
  return rep;
}

CheckReport concave2(const DistributionSpec& spec, double p, std::optional<double> claimed_r) {
  const double r = effective_r(spec, claimed_r);
  if (std::isinf(r)) throw HypothesisError("log-concave spec: pass the r at which it is treated as (-1/r)-concave");
  CheckReport rep;
  rep.check_id = "concave2";
  rep.params = base_params(spec);
  rep.params["p"] = p;
  rep.params["r"] = real(r);
  rep.params["budget_sweep"] = kBudgetSweep;
  bool origin_always = true;
  sweep_budgets(rep, [&](double budget, nlohmann::json& detail) {
    const auto res = geometry::concave2_check(spec, p, budget, r);
    origin_always = origin_always && res.origin_inside;
    detail["spec"] = {{"alpha", res.alpha}, {"c3", res.c3}, {"ratio", res.ratio}, {"origin_inside", res.origin_inside}};
    return std::vector<double>{res.ratio};
  });
  if (!origin_always) rep.record_failure("origin outside K_alpha in some instance");
  rep.finalize();
  return rep;
}

CheckReport polar_formula(const DistributionSpec& spec, double tol) {
  CheckReport rep;
  rep.check_id = "polar-formula";
  rep.params = base_params(spec);
  rep.params["m"] = 1;
  rep.params["tol"] = tol;
  const auto res = geometry::polar_formula_check(spec);
  rep.observed["lhs"] = res.lhs;
  rep.observed["rhs"] = res.rhs;
  rep.observed["gap"] = res.gap;
  rep.observed["marginal_at_zero"] = res.marginal_at_zero;
  rep.record(res.gap / tol, res.gap / tol);
  rep.finalize();
  return rep;
}

CheckReport polar_levelset(const DistributionSpec& spec, double p, std::optional<double> claimed_r) {
  const double r = effective_r(spec, claimed_r);
  if (std::isinf(r)) throw HypothesisError("log-concave spec: pass the r at which it is treated as (-1/r)-concave");
  CheckReport rep;
  rep.check_id = "polar-levelset";
  rep.params = base_params(spec);
  rep.params["p"] = p;
  rep.params["r"] = r;
  rep.params["budget_sweep"] = kBudgetSweep;
  bool origin_always = true;
  sweep_budgets(rep, [&](double budget, nlohmann::json& detail) {
    const auto res = geometry::polar_levelset_check(spec, p, r, budget);
    origin_always = origin_always && res.origin_inside;
    detail["spec"] = {{"sigma_p", res.sigma_p}, {"segment_length", res.segment_length}, {"alpha", res.alpha},
                      {"interval_length", res.interval_length}, {"c3", res.c3}, {"ratio", res.ratio}};
    return std::vector<double>{res.ratio};
  });
  if (!origin_always) rep.record_failure("origin outside K_alpha(g_F)");
  rep.finalize();
  return rep;
}

CheckReport lemma11() {
  CheckReport rep;
  rep.check_id = "lemma11";
  constexpr double kSlack = 1e-7;
  struct Phi {
    const char* name;
    std::function<double(double, double)> f;
    bool extremal;
  };
  const std::vector<Phi> phis = {
      {"x-s", [](double x, double s) { return x - s; }, true},
      {"sqrt(x-s)", [](double x, double s) { return std::sqrt(x - s); }, false},
      {"min(x-s,1)", [](double x, double s) { return std::min(x - s, 1.0); }, false},
      {"log(1+x-s)", [](double x, double s) { return std::log1p(x - s); }, false},
      {"(x-s)^0.7", [](double x, double s) { return std::pow(x - s, 0.7); }, false},
  };
  rep.params["rel_slack"] = kSlack;
  for (const auto& phi : phis) {
    for (double s : {0.5, 1.0, 2.0}) {
      for (double m : {1.0, 2.0}) {
        std::vector<double> betas;
        for (double d : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) betas.push_back(m + 1.0 + d);
        const auto res = geometry::G_monotonicity_check([&](double x) { return phi.f(x, s); }, s, m, betas, kSlack);
        double worst = 0.0;
        for (std::size_t k = 1; k < res.values.size(); ++k) {
          worst = std::max(worst, res.values[k - 1] / res.values[k] / (1.0 + kSlack));
        }
        rep.record(worst, worst);
        if (!res.nondecreasing) rep.record_failure(std::string("G decreases for phi = ") + phi.name);
        if (phi.extremal) {
          double off = 0.0;
          for (double v : res.values) off = std::max(off, std::abs(v - 1.0));
          if (off > 1e-9) rep.record_failure("G is not constant for phi(x) = x - s");
        }
        rep.rows.push_back({{"phi", phi.name}, {"s", s}, {"m", m}, {"spread", res.spread},
                            {"first", res.values.front()}, {"last", res.values.back()}});
      }
    }
  }
  rep.finalize();
  return rep;
}

CheckReport lemma12() {
  CheckReport rep;
  rep.check_id = "lemma12";
  constexpr double kTol = 1e-10;
  struct F {
    const char* name;
    std::function<double(double)> f;
  };
  const std::vector<F> fs = {
      {"1+|t|", [](double t) { return 1.0 + std::abs(t); }},
      {"1+|t|+t/2", [](double t) { return 1.0 + std::abs(t) + 0.5 * t; }},
      {"1+t^2", [](double t) { return 1.0 + t * t; }},
      {"max(1-t,1+3t)", [](double t) { return std::max(1.0 - t, 1.0 + 3.0 * t); }},
      {"cosh(t)+t/3", [](double t) { return std::cosh(t) + t / 3.0; }},
  };
  const std::vector<double> betas = {2.5, 3.0, 5.0, 10.0};
  std::vector<geometry::G0Result> results(fs.size() * betas.size());
  parallel_for(results.size(), [&](std::size_t i) {
    const auto g = geometry::make_borell_density_1d(fs[i / betas.size()].f, betas[i % betas.size()], {0.0}, true);
    results[i] = geometry::g0_bound_check(g);
  });
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& res = results[i];
    const double ratio = (res.factor * res.sup_norm - kTol) / res.g0;
    rep.record(ratio, ratio);
    rep.rows.push_back({{"f", fs[i / betas.size()].name}, {"beta", betas[i % betas.size()]}, {"g0", res.g0},
                        {"sup_norm", res.sup_norm}, {"factor", res.factor}, {"margin", res.margin}});
  }
  nlohmann::json limits = nlohmann::json::array();
  for (int m : {1, 2}) {
    const double rel = geometry::g0_factor(1000.0, m) / std::exp(-static_cast<double>(m));
    limits.push_back({{"m", m}, {"factor_over_exp_minus_m", rel}});
    rep.record(std::abs(rel - 1.0) / 0.01, std::abs(rel - 1.0) / 0.01);
  }
  rep.observed["beta_limit"] = limits;
  rep.finalize();
  return rep;
}

CheckReport oracle_agreement(const DistributionSpec& spec, std::vector<double> p_grid, std::size_t n_samples,
                             std::uint64_t seed, double z) {
  if (!spec.radial()) throw HypothesisError("oracle agreement needs a radial spec");
  const int n = spec.dim();
  if (p_grid.empty()) {
    p_grid = {1.0, 2.0};
    p_grid.push_back(std::isfinite(spec.r()) ? 0.5 * spec.r() - 0.5 : 4.0);
  }
  CheckReport rep;
  rep.check_id = "oracle-agreement";
  rep.budget = z;
  rep.params = base_params(spec);
  rep.params["p_grid"] = p_grid;
  rep.params["n_samples"] = n_samples;
  rep.params["seed"] = seed;
  rep.params["z"] = z;

  const auto batch = sample(spec, seed, n_samples);
  std::vector<double> axis(n, 0.0);
  axis[0] = 1.0;
  const auto compare = [&](const char* stat, double p, const MomentEstimate& e, double truth) {
    const double se = e.std_error;
    const double score = se > 0.0 ? std::abs(e.value - truth) / (z * se) : (e.value == truth ? 0.0 : kInf);
    rep.record(score, score);
    rep.rows.push_back({{"statistic", stat}, {"p", p}, {"estimate", e.value}, {"oracle", truth}, {"se", se},
                        {"z_score", se > 0.0 ? std::abs(e.value - truth) / se : 0.0}});
  };
  // Plain mean of |X|^p with its sample standard error: the sampler itself
  // against the oracle, independent of the robust estimator.
  const auto power_mean = [&](double p) {
    double sum = 0.0, sum2 = 0.0;
    for (double v : batch.norms()) {
      const double w = std::pow(v, p);
      sum += w;
      sum2 += w * w;
    }
    const double count = static_cast<double>(batch.count());
    MomentEstimate e;
    e.value = sum / count;
    e.std_error = std::sqrt(std::max(0.0, sum2 / count - e.value * e.value) / (count - 1.0));
    e.method = EstimateMethod::plain_mean;
    e.n_samples = batch.count();
    e.p = p;
    return e;
  };
  for (double p : p_grid) {
    compare("power_mean", p, power_mean(p), radial_moment_oracle(spec, p));
    compare("strong", p, strong_moment(batch, p), std::pow(radial_moment_oracle(spec, p), 1.0 / p));
    compare("weak", p, directional_moment(batch, axis, p), weak_moment_oracle(spec, p).value);
    if (p < 0.5 * n && batch.count() >= kMinNegativeSamples) {
      compare("negative", p, negative_moment(batch, p), std::pow(radial_moment_oracle(spec, -p), -1.0 / p));
    }
  }
  rep.finalize();
  return rep;
}

}  // namespace convexmoments::verify
