#include <benchmark/benchmark.h>

#include <vector>

#include "trapwalk/environment.hpp"
#include "trapwalk/limitlaw.hpp"
#include "trapwalk/montecarlo.hpp"
#include "trapwalk/rng.hpp"
#include "trapwalk/spectral.hpp"
#include "trapwalk/survival.hpp"

using namespace trapwalk;

namespace {

void bm_interval_sum(benchmark::State& state) {
  Coord l = state.range(0);
  double t = 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(interval_sum_survival(l, t));
}
BENCHMARK(bm_interval_sum)->Arg(10)->Arg(100)->Arg(1000)->Arg(10000);

void bm_annealed_series(benchmark::State& state) {
  double t = double(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(annealed_exact_1d(0.5, t, 1e-12).value);
}
BENCHMARK(bm_annealed_series)->Arg(10)->Arg(100)->Arg(1000)->Arg(10000);

void bm_environment(benchmark::State& state) {
  Coord radius = state.range(0);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto env = sample_environment(1, radius, 0.5, seed++);
    benchmark::DoNotOptimize(env.occupancy.data());
  }
  state.SetItemsProcessed(state.iterations() * (2 * radius + 1));
}
BENCHMARK(bm_environment)->Arg(1000)->Arg(100000);

void bm_walk(benchmark::State& state) {
  double t = double(state.range(0));
  SplitMix64 rng(42);
  std::vector<double> radii;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_walk(1, t, radii, rng).sausage_size);
}
BENCHMARK(bm_walk)->Arg(10)->Arg(100);

void bm_killed_walk(benchmark::State& state) {
  auto env = sample_environment(1, 300, 0.5, 7);
  std::vector<Coord> x{0};
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(killed_walk_mc(env, x, 10.0, 1000, seed++).estimate.mean);
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(bm_killed_walk);

void bm_quenched_average(benchmark::State& state) {
  Coord radius = state.range(0);
  auto env = sample_environment(1, radius, 0.5, 11);
  for (auto _ : state) benchmark::DoNotOptimize(averaged_survival(env, 50.0, radius).value);
}
BENCHMARK(bm_quenched_average)->Arg(1000)->Arg(10000);

void bm_normalized_draw(benchmark::State& state) {
  auto sp = scaling_params(0.5, 0.5, 1.0);
  NormalizedSumSampler sampler(0.5, 0.5, 1.0, sp.time_at(Coord(state.range(0)), 0.9), false);
  SplitMix64 rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(sampler.draw(rng).value);
}
BENCHMARK(bm_normalized_draw)->Arg(10)->Arg(15)->Arg(20);

void bm_dense_spectrum(benchmark::State& state) {
  Coord l = state.range(0);
  std::vector<Coord> sites(static_cast<std::size_t>(l));
  for (Coord i = 0; i < l; ++i) sites[std::size_t(i)] = i;
  SiteSet set(1, sites);
  for (auto _ : state) benchmark::DoNotOptimize(dense_spectrum(set).eigenvalues[0]);
}
BENCHMARK(bm_dense_spectrum)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
