#include <benchmark/benchmark.h>

#include <random>

#include "scdim/coarsemaps.hpp"
#include "scdim/metricspace.hpp"

namespace {

using namespace scdim;

void BM_Ultrametrize(benchmark::State& state) {
  const auto x = random_metric(5, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ultrametrize(x));
}
BENCHMARK(BM_Ultrametrize)->RangeMultiplier(2)->Range(16, 128);

void BM_EmbedLOmega(benchmark::State& state) {
  const auto x = random_ultrametric(9, static_cast<std::size_t>(state.range(0)), 6, {.jitter = true});
  for (auto _ : state) benchmark::DoNotOptimize(embed_lomega(x));
}
BENCHMARK(BM_EmbedLOmega)->RangeMultiplier(2)->Range(16, 128);

// Random graph with edge probability one half.
void BM_MaximalCliques(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) adj[i][j] = adj[j][i] = static_cast<char>(rng() & 1);
  for (auto _ : state) benchmark::DoNotOptimize(maximal_cliques(adj, 1000000));
}
BENCHMARK(BM_MaximalCliques)->Arg(20)->Arg(40)->Arg(60);

void BM_MapDimControlProjection(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto box = grid_box(2, side), column = grid_box(1, side);
  std::vector<std::size_t> image(box.size());
  for (std::size_t i = 0; i < box.size(); ++i) image[i] = i / (side + 1);
  const PointMap f(box, column, image);
  for (auto _ : state) benchmark::DoNotOptimize(map_dim_control(f, 1, Rational(1), Rational(2)));
}
BENCHMARK(BM_MapDimControlProjection)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace
