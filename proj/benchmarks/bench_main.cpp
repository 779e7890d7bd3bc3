#include <benchmark/benchmark.h>

#include "nmfcheck/dpbs.hpp"
#include "nmfcheck/simulate.hpp"

namespace {

using namespace nmfcheck;

CountMatrix null_matrix(std::size_t rows, std::size_t cols, std::size_t k) {
  SimulationConfig cfg;
  cfg.rows = rows;
  cfg.cols = cols;
  cfg.k = k;
  Stream s = derive_stream(SeedPath(42, {0}));
  return generate_null_instance(cfg, s).x;
}

void BM_Factorize(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const auto cols = static_cast<std::size_t>(state.range(1));
  const auto k = static_cast<std::size_t>(state.range(2));
  const CountMatrix x = null_matrix(rows, cols, k);
  NmfConfig cfg;
  std::uint64_t n = 0;
  long iterations = 0;
  for (auto _ : state) {
    Stream s = derive_stream(SeedPath(7, {n++}));
    auto f = factorize(x, k, cfg, s);
    iterations += f.iterations_run;
    benchmark::DoNotOptimize(f.objective_trace.back());
  }
  state.counters["nmf_iters"] =
      benchmark::Counter(static_cast<double>(iterations), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_Factorize)->Args({10, 16, 5})->Args({23, 23, 10})->Args({92, 23, 10})
    ->Unit(benchmark::kMillisecond);

// Fixed iteration count: cost of one multiplicative-update sweep.
void BM_FactorizeFixedIterations(benchmark::State& state) {
  const CountMatrix x = null_matrix(10, 16, 5);
  NmfConfig cfg;
  cfg.max_iterations = static_cast<int>(state.range(0));
  cfg.relative_tolerance = 1e-300;
  for (auto _ : state) {
    Stream s = derive_stream(SeedPath(7, {0}));
    benchmark::DoNotOptimize(factorize(x, 5, cfg, s).objective_trace.back());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FactorizeFixedIterations)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_FirstLevel(benchmark::State& state) {
  const CountMatrix x = null_matrix(10, 16, 5);
  DpbsConfig cfg;
  cfg.k = 5;
  cfg.b1 = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(first_level(x, cfg).rho_star);
  }
}
BENCHMARK(BM_FirstLevel)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_PoissonSample(benchmark::State& state) {
  const double lambda = static_cast<double>(state.range(0));
  Stream s(1);
  for (auto _ : state) benchmark::DoNotOptimize(sample_poisson(lambda, s));
}
BENCHMARK(BM_PoissonSample)->Arg(1)->Arg(9)->Arg(10)->Arg(500)->Arg(100000);

void BM_Gkl(benchmark::State& state) {
  const CountMatrix x = null_matrix(92, 23, 10);
  const RateMatrix xhat = RateMatrix::from(x);
  for (auto _ : state) benchmark::DoNotOptimize(gkl_divergence(x, xhat));
}
BENCHMARK(BM_Gkl);

}  // namespace
