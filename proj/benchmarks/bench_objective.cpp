#include <benchmark/benchmark.h>

#include "ddopt/filter.hpp"
#include "ddopt/objective.hpp"
#include "ddopt/sequence.hpp"

namespace {

void BM_ObjectiveQuadrature(benchmark::State& state) {
  const auto seq = ddopt::udd(static_cast<int>(state.range(0)));
  const double z_c = static_cast<double>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(ddopt::objective_quadrature(seq, z_c).value);
}
BENCHMARK(BM_ObjectiveQuadrature)->ArgsProduct({{2, 5, 10}, {1, 5, 20}});

void BM_ObjectiveSeries(benchmark::State& state) {
  const auto seq = ddopt::udd(static_cast<int>(state.range(0)));
  const double z_c = static_cast<double>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(ddopt::objective_series(seq, z_c).value);
}
BENCHMARK(BM_ObjectiveSeries)->ArgsProduct({{2, 5, 10}, {1, 5, 20}});

void BM_Gradient(benchmark::State& state) {
  const auto seq = ddopt::udd(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ddopt::gradient(seq, 5.0));
}
BENCHMARK(BM_Gradient)->Arg(2)->Arg(5)->Arg(10);

void BM_FilterValue(benchmark::State& state) {
  const auto seq = ddopt::udd(static_cast<int>(state.range(0)));
  double z = 0.0;
  for (auto _ : state) {
    z += 1e-3;
    benchmark::DoNotOptimize(ddopt::filter_value(seq, z).magnitude_squared);
  }
}
BENCHMARK(BM_FilterValue)->Arg(2)->Arg(10);

}  // namespace
