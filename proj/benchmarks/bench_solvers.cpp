#include <benchmark/benchmark.h>

#include "scdim/dimsolver.hpp"
#include "scdim/funcalg.hpp"
#include "scdim/metricspace.hpp"

namespace {

using namespace scdim;

void BM_ExactDnRandomMetric(benchmark::State& state) {
  const auto x = random_metric(7, static_cast<std::size_t>(state.range(0)));
  const auto n = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(exact_dn(x, n, Rational(3)));
}
BENCHMARK(BM_ExactDnRandomMetric)->ArgsProduct({{8, 12, 16, 20}, {0, 1}});

void BM_ExactDnGrid(benchmark::State& state) {
  const auto x = grid_box(2, 6);
  SolveOptions options;
  options.exact_cap = 64;
  const Rational s(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(exact_dn(x, 1, s, options));
}
BENCHMARK(BM_ExactDnGrid)->DenseRange(3, 6)->Unit(benchmark::kMillisecond);

void BM_HeuristicDnGrid(benchmark::State& state) {
  const auto x = grid_box(2, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(heuristic_dn(x, 2, Rational(2)));
}
BENCHMARK(BM_HeuristicDnGrid)->Arg(8)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_D0Bound(benchmark::State& state) {
  const auto x = random_metric(11, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(d0_bound(x, Rational(4)));
}
BENCHMARK(BM_D0Bound)->RangeMultiplier(2)->Range(16, 256);

void BM_CounterexampleBuild(benchmark::State& state) {
  const auto f = ControlFunction::monomial(1, 2, 1);
  const auto depth = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(counterexample_space(f, depth));
}
BENCHMARK(BM_CounterexampleBuild)->DenseRange(1, 5);

void BM_ProfileUltrametric(benchmark::State& state) {
  const auto x = random_ultrametric(3, static_cast<std::size_t>(state.range(0)), 5, {.jitter = true});
  const auto scales = auto_scales(x);
  for (auto _ : state) benchmark::DoNotOptimize(profile(x, 1, scales));
}
BENCHMARK(BM_ProfileUltrametric)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

}  // namespace
