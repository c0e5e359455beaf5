// Serial against OpenMP for the hot kernels.
// Arg 0: serial reference path. Arg 1: parallel path on one thread, which
// isolates the algorithmic difference (cached weights, fused transforms).
// Arg 2: parallel path on all threads.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

#include "nsv/fraccalc.hpp"
#include "nsv/greenop.hpp"
#include "nsv/projection.hpp"
#include "nsv/random_fields.hpp"
#include "nsv/solver.hpp"

namespace {

using namespace nsv;

Exec exec_of(const benchmark::State& st) {
  static const int all = omp_get_max_threads();
  omp_set_num_threads(st.range(0) == 1 ? 1 : all);
  return st.range(0) ? Exec::parallel : Exec::serial;
}

SpaceTimeField forcing(int modes, int steps) {
  Rng rng(1);
  return random_space_time_field(TimeGrid{1.0, steps}, DomainSpec::cube(modes), rng);
}

void BM_HeatSolve(benchmark::State& st) {
  const SpaceTimeField f = forcing(8, 64);
  for (auto _ : st) benchmark::DoNotOptimize(heat_solve(f, {1.0}, exec_of(st)));
}
BENCHMARK(BM_HeatSolve)->DenseRange(0, 2)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_NonlinearTerm(benchmark::State& st) {
  const SpaceTimeField u = forcing(8, 32);
  for (auto _ : st) benchmark::DoNotOptimize(nonlinear_term(u, exec_of(st)));
}
BENCHMARK(BM_NonlinearTerm)->DenseRange(0, 2)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_PressureGradient(benchmark::State& st) {
  const SpaceTimeField w = forcing(8, 32);
  for (auto _ : st) benchmark::DoNotOptimize(pressure_gradient_from_w(w, exec_of(st)));
}
BENCHMARK(BM_PressureGradient)->DenseRange(0, 2)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_FracIntegral(benchmark::State& st) {
  const TimeGrid tg{1.0, 4096};
  TimeSeries u(tg);
  for (int n = 0; n < tg.nodes(); ++n) u[n] = std::sin(3 * tg.time(n));
  const FracOrder mu(0.625);
  for (auto _ : st) benchmark::DoNotOptimize(frac_integral(u, mu, exec_of(st)));
}
BENCHMARK(BM_FracIntegral)->DenseRange(0, 2)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_SobolevPotential(benchmark::State& st) {
  DomainSpec d;
  d.length = {1, 1, 1};
  d.modes = {0, 0, 0};
  d.grid = {16, 16, 16};
  GridSamples f{d, {16, 16, 16}, std::vector<double>(16 * 16 * 16)};
  Rng rng(2);
  std::normal_distribution<double> g;
  for (double& v : f.values) v = g(rng);
  for (auto _ : st) benchmark::DoNotOptimize(sobolev_potential(f, 1.25, 24, exec_of(st)));
}
BENCHMARK(BM_SobolevPotential)->DenseRange(0, 2)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
