#include <benchmark/benchmark.h>

#include "ddopt/solver.hpp"

namespace {

void BM_SolveHlodd(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const double z_c = static_cast<double>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(ddopt::solve_hlodd(n, z_c).objective.value);
}
BENCHMARK(BM_SolveHlodd)
    ->ArgsProduct({{2, 5, 8}, {1, 5}})
    ->Unit(benchmark::kMillisecond);

void BM_VerifyMinimum(benchmark::State& state) {
  const auto result = ddopt::solve_hlodd(static_cast<int>(state.range(0)), 5.0);
  for (auto _ : state) benchmark::DoNotOptimize(ddopt::verify_minimum(result.sequence, 5.0).verified);
}
BENCHMARK(BM_VerifyMinimum)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace
