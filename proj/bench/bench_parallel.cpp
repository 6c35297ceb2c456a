// Serial reference against the OpenMP kernels. Set RABI_THREADS to pin the
// worker count of the parallel runs.
#include <benchmark/benchmark.h>

#include "rabi/observables.hpp"
#include "rabi/parallel.hpp"
#include "rabi/spectrum.hpp"

using namespace rabi;

namespace {

ModelParams family(double g = 0) {
  ModelParams p;
  p.kind = ModelKind::TwoPhoton;
  p.delta = 0.2;
  p.lambda = 0.25;
  p.g = g;
  return p;
}

Execution mode(const benchmark::State& st) {
  return st.range(0) ? Execution::Parallel : Execution::Serial;
}

void BM_GGrid(benchmark::State& st) {
  const ModelParams p = family(0.3);
  const auto energies = linspace(-0.5, 4, 2000);
  for (auto _ : st) benchmark::DoNotOptimize(sample_g_grid(p, energies, mode(st)));
  st.SetItemsProcessed(st.iterations() * energies.size());
}

void BM_Sweep(benchmark::State& st) {
  SweepOptions opts;
  opts.exec = mode(st);
  const auto grid = linspace(0, 0.79, 20);
  for (auto _ : st) benchmark::DoNotOptimize(sweep_spectrum(family(), grid, 2, opts));
  st.SetItemsProcessed(st.iterations() * grid.size());
}

void BM_Entropy(benchmark::State& st) {
  EntropyOptions opts;
  opts.exec = mode(st);
  const auto grid = linspace(0, 0.6, 12);
  for (auto _ : st) benchmark::DoNotOptimize(entropy_sweep(family(), grid, opts));
  st.SetItemsProcessed(st.iterations() * grid.size());
}

}  // namespace

BENCHMARK(BM_GGrid)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Entropy)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
