// Monte Carlo trajectory batch: serial reference vs the OpenMP parallel_map.

#include <benchmark/benchmark.h>

#include "roughflow/parallel.hpp"
#include "roughflow/philox.hpp"
#include "roughflow/turbulence.hpp"

using namespace roughflow;

namespace {

Vec endpoint(int i) {
  const KernelSpec k = default_kernel(2);
  const Vec v = Vec::Unit(2, 0), x0 = Vec::Zero(2);
  const double eps = 0.2, T = 1.0;
  const FieldRealization F(k, mix_seed(2024, 0, static_cast<uint64_t>(i)), trajectory_box(v, eps, T, {x0}, 4.0));
  return rescaled_trajectory(F, v, eps, T, x0).x.back();
}

void BM_Serial(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(serial_map<Vec>(n, endpoint));
  st.SetItemsProcessed(st.iterations() * n);
}

void BM_Parallel(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0)), workers = static_cast<int>(st.range(1));
  for (auto _ : st) benchmark::DoNotOptimize(parallel_map<Vec>(n, workers, endpoint));
  st.SetItemsProcessed(st.iterations() * n);
}

}  // namespace

BENCHMARK(BM_Serial)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Parallel)->Args({32, 2})->Args({32, 4})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
