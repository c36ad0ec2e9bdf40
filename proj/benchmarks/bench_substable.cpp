#include <benchmark/benchmark.h>

#include "substable/char_fn.hpp"
#include "substable/delta_method.hpp"
#include "substable/estimators.hpp"
#include "substable/monte_carlo.hpp"
#include "substable/omega.hpp"
#include "substable/sampler.hpp"

namespace {

using namespace substable;

StableParams bench_params(double alpha) {
  return StableParams(alpha, Eigen::VectorXd::Zero(3), sigma_equal_dependent());
}

void BM_SampleSubgaussian(benchmark::State& state) {
  const auto params = bench_params(1.0);
  const long n = state.range(0);
  std::uint64_t stream = 0;
  for (auto _ : state) {
    auto sample = sample_subgaussian(params, n, {42, stream++});
    benchmark::DoNotOptimize(sample.data().data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SampleSubgaussian)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_PositiveStable(benchmark::State& state) {
  std::uint64_t stream = 0;
  for (auto _ : state) {
    auto draws = sample_positive_stable(0.5, state.range(0), {42, stream++});
    benchmark::DoNotOptimize(draws.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PositiveStable)->Arg(10000)->Arg(100000);

void BM_EcfBatch(benchmark::State& state) {
  const auto params = bench_params(1.0);
  const auto sample = sample_subgaussian(params, state.range(0), {42, 0});
  const auto grid = build_grid(3, FrequencyPair{});
  for (auto _ : state) {
    auto values = ecf_batch(sample, grid.columns);
    benchmark::DoNotOptimize(values.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * grid.m());
}
BENCHMARK(BM_EcfBatch)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_EstimateAll(benchmark::State& state) {
  const auto params = bench_params(1.0);
  const auto sample = sample_subgaussian(params, state.range(0), {42, 0});
  for (auto _ : state) {
    auto report = estimate_all(sample, FrequencyPair{});
    benchmark::DoNotOptimize(report.alpha_hat);
  }
}
BENCHMARK(BM_EstimateAll)->Arg(1000)->Arg(10000);

void BM_Omega(benchmark::State& state) {
  const auto params = bench_params(1.0);
  const auto grid = build_grid(3, FrequencyPair{});
  for (auto _ : state) {
    auto om = omega(params, grid);
    benchmark::DoNotOptimize(om.full.data());
  }
}
BENCHMARK(BM_Omega);

void BM_JacobianFd(benchmark::State& state) {
  const auto params = bench_params(1.0);
  const auto grid = build_grid(3, FrequencyPair{});
  const auto theta0 = moment_vector(params, grid);
  for (auto _ : state) {
    auto jac = jacobian_fd(theta0, FrequencyPair{}, 3);
    benchmark::DoNotOptimize(jac.data());
  }
}
BENCHMARK(BM_JacobianFd);

void BM_DeltaCovariance(benchmark::State& state) {
  const auto params = bench_params(1.0);
  for (auto _ : state) {
    auto report = delta_covariance(params, FrequencyPair{}, 10000);
    benchmark::DoNotOptimize(report.covariance.data());
  }
}
BENCHMARK(BM_DeltaCovariance);

}  // namespace

BENCHMARK_MAIN();
