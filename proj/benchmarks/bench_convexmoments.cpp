#include <benchmark/benchmark.h>

#include <cmath>

#include "convexmoments/constants.hpp"
#include "convexmoments/distributions.hpp"
#include "convexmoments/estimators.hpp"
#include "convexmoments/geometry.hpp"

using namespace convexmoments;

namespace {

constexpr std::size_t kRows = 100'000;

DistributionSpec spec_for(int family_index, int dim) {
  switch (family_index) {
    case 0: return make_distribution(Family::gaussian, dim, kLogConcave, true);
    case 1: return make_distribution(Family::student_t, dim, 10.0, true);
    default: return make_distribution(Family::radial_pareto, dim, 10.0, true);
  }
}

void BM_Sample(benchmark::State& state) {
  const auto spec = spec_for(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sample(spec, seed++, kRows));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(kRows));
}
BENCHMARK(BM_Sample)->ArgsProduct({{0, 1, 2}, {4, 64}})->Unit(benchmark::kMillisecond);

void BM_StrongMoment(benchmark::State& state) {
  const auto batch = sample(spec_for(2, 16), 3, kRows);
  for (auto _ : state) benchmark::DoNotOptimize(strong_moment(batch, 4.0));
}
BENCHMARK(BM_StrongMoment)->Unit(benchmark::kMillisecond);

void BM_WeakMoment(benchmark::State& state) {
  // Radial specs short-circuit to the oracle; the product law exercises the search.
  const auto spec = make_distribution(Family::laplace_product, static_cast<int>(state.range(0)), kLogConcave, true);
  const auto batch = sample(spec, 3, kRows);
  for (auto _ : state) benchmark::DoNotOptimize(weak_moment(batch, 4.0));
}
BENCHMARK(BM_WeakMoment)->Arg(4)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_NegativeMoment(benchmark::State& state) {
  const auto batch = sample(spec_for(1, 16), 3, kRows);
  for (auto _ : state) benchmark::DoNotOptimize(negative_moment(batch, 2.0));
}
BENCHMARK(BM_NegativeMoment)->Unit(benchmark::kMillisecond);

void BM_CovarianceDeviation(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto batch = sample(spec_for(0, n), 3, static_cast<std::size_t>(n) * 256);
  for (auto _ : state) benchmark::DoNotOptimize(covariance_deviation(batch));
}
BENCHMARK(BM_CovarianceDeviation)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_RadialMomentOracle(benchmark::State& state) {
  const auto spec = spec_for(2, 16);
  double p = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(radial_moment_oracle(spec, p));
    p = p > 4.0 ? 0.5 : p + 0.01;
  }
}
BENCHMARK(BM_RadialMomentOracle);

void BM_MarginalDensity(benchmark::State& state) {
  const auto spec = spec_for(1, 16);
  double rho = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(marginal_density_at_radius(spec, 2, rho));
    rho = rho > 5.0 ? 0.0 : rho + 0.01;
  }
}
BENCHMARK(BM_MarginalDensity);

void BM_LevelSet2d(benchmark::State& state) {
  const auto g = [](double x, double y) { return std::pow(1.0 + std::hypot(x, 0.5 * y), -8.0); };
  for (auto _ : state) benchmark::DoNotOptimize(geometry::level_set_2d(g, 2.0, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_LevelSet2d)->Arg(90)->Arg(720)->Unit(benchmark::kMillisecond);

void BM_ConstantBundle(benchmark::State& state) {
  double p = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(constants::constant_bundle(p, 10.0));
    p = p > 9.0 ? 1.0 : p + 0.01;
  }
}
BENCHMARK(BM_ConstantBundle);

}  // namespace

BENCHMARK_MAIN();
