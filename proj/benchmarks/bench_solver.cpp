#include <benchmark/benchmark.h>

#include <cmath>

#include "pedflow/solver.hpp"

namespace {

using namespace pedflow;

StateField wavy(const ModelSpec& m, const Grid1D& g) {
  StateField f(m.n_conserved(), g.n_cells());
  for (std::size_t i = 0; i < g.n_cells(); ++i) {
    const double s = std::sin(0.05 * static_cast<double>(i));
    f(0, i) = 0.35 + 0.01 * s;
    f(1, i) = 0.3 - 0.01 * s;
    if (m.is_ar()) {
      f(2, i) = f(0, i);
      f(3, i) = f(1, i);
    }
  }
  return f;
}

void BM_SimFluxStep(benchmark::State& state) {
  const auto m = ModelSpec::sim_flux({0.7});
  const Grid1D g(static_cast<std::size_t>(state.range(0)), 1.0);
  const StateField f = wavy(m, g);
  const SchemeParams p;
  for (auto _ : state) {
    StateField next = step(m, f, g, p);
    benchmark::DoNotOptimize(next);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimFluxStep)->Arg(200)->Arg(512)->Arg(4096);

void BM_TwoWayARStep(benchmark::State& state) {
  const auto m = ModelSpec::two_way_ar(PressureParams(0.5, 2.0, 1e-2, 2.0, 1.0));
  const Grid1D g(static_cast<std::size_t>(state.range(0)), 1.0);
  const StateField f = wavy(m, g);
  SchemeParams p;
  p.dt = 0.05;
  for (auto _ : state) {
    StateField next = step(m, f, g, p);
    benchmark::DoNotOptimize(next);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TwoWayARStep)->Arg(200)->Arg(4096);

}  // namespace
