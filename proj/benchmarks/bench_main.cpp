#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>
#include <vector>

#include "qdnls/experiments.hpp"
#include "qdnls/initial_data.hpp"
#include "qdnls/integrator.hpp"

using namespace qdnls;

namespace {

TorusGrid grid_for(int dim, int n) { return TorusGrid(dim, n, default_period(dim)); }

void BM_FftRoundTrip(benchmark::State& st) {
  const int dim = int(st.range(0)), n = int(st.range(1));
  SpectralField f = random_bump_state(grid_for(dim, n), 1).u;
  for (auto _ : st) {
    f.make_physical();
    f.make_spectral();
    benchmark::DoNotOptimize(f.values().data());
  }
  st.SetItemsProcessed(st.iterations() * std::int64_t(f.values().size()));
}
BENCHMARK(BM_FftRoundTrip)->Args({1, 256})->Args({1, 4096})->Args({2, 64})->Args({2, 128});

void BM_Nonlinearity(benchmark::State& st) {
  const int dim = int(st.range(0)), n = int(st.range(1));
  const StateTriple s = random_bump_state(grid_for(dim, n), 2);
  for (auto _ : st) benchmark::DoNotOptimize(nonlinearity(s));
}
BENCHMARK(BM_Nonlinearity)->Args({1, 256})->Args({2, 64})->Args({2, 128});

void BM_Ifrk4Step(benchmark::State& st) {
  const int dim = int(st.range(0)), n = int(st.range(1));
  const TorusGrid g = grid_for(dim, n);
  const SystemParams p(-1, 1, 1, dim);
  const StateTriple data = random_bump_state(g, 3);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 20 * cfg.dt;
  EvolveOptions o;
  o.diagnostics = false;
  for (auto _ : st) benchmark::DoNotOptimize(evolve(data, p, cfg, o));
  st.SetItemsProcessed(st.iterations() * 20);
}
BENCHMARK(BM_Ifrk4Step)->Args({1, 256})->Args({2, 64})->Args({2, 128})->Unit(benchmark::kMillisecond);

void BM_Picard2Norm(benchmark::State& st) {
  const SystemParams p(1, 1, 1, int(st.range(0)));
  const IllposedData d = illposed_data(make_illposed_case(IllposedVariant::alpha_eq_gamma, p, 64));
  const Picard2 pic(d, p);
  const std::vector<double> times = default_t_grid(0.1);
  for (auto _ : st) benchmark::DoNotOptimize(pic.hs_norm(0.5, times));
}
BENCHMARK(BM_Picard2Norm)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_GramIntegral(benchmark::State& st) {
  const int m = int(st.range(0));
  std::vector<std::complex<double>> c(m);
  std::vector<double> om(m);
  for (int i = 0; i < m; ++i) {
    c[i] = std::polar(1.0, 0.37 * i);
    om[i] = std::floor(0.5 * i) * 1.25;
  }
  for (auto _ : st) benchmark::DoNotOptimize(gram_time_integral(c, om, 1.0));
}
BENCHMARK(BM_GramIntegral)->Arg(16)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
