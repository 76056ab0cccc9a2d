#include <benchmark/benchmark.h>

#include "pedflow/analysis.hpp"

namespace {

using namespace pedflow;

void BM_HyperbolicityMap(benchmark::State& state) {
  const auto m = ModelSpec::sim_flux({0.7});
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto map = hyperbolicity_map(m, n);
    benchmark::DoNotOptimize(map);
  }
}
BENCHMARK(BM_HyperbolicityMap)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_InstabilitySummary(benchmark::State& state) {
  const auto m = ModelSpec::sim_flux({0.7});
  for (auto _ : state) {
    auto r = instability_summary(diffusive_speeds(m, 0.5, 0.3), 0.4);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_InstabilitySummary);

}  // namespace
