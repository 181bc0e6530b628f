// Serial reference scans against the OpenMP kernels and the ball tree.
//
//   ./bench_spatial_index --benchmark_filter=Batch

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "pedmap/spatial_index.hpp"

using namespace pedmap;

namespace {

std::vector<GeoPoint> box_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 0.1);
  std::vector<GeoPoint> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pts.emplace_back(32.8 + u(rng), -117.3 + u(rng));
  return pts;
}

constexpr std::size_t kQueries = 256;

void BM_BatchBruteSerial(benchmark::State& state) {
  const auto pts = box_points(state.range(0), 1);
  const auto queries = box_points(kQueries, 2);
  for (auto _ : state) {
    for (const auto& q : queries) benchmark::DoNotOptimize(nearest_brute_force(pts, q));
  }
  state.SetItemsProcessed(state.iterations() * kQueries);
}

void BM_BatchBruteOmp(benchmark::State& state) {
  const auto pts = box_points(state.range(0), 1);
  const auto queries = box_points(kQueries, 2);
  for (auto _ : state) benchmark::DoNotOptimize(nearest_brute_force_batch(pts, queries));
  state.SetItemsProcessed(state.iterations() * kQueries);
}

void BM_BatchTreeSerial(benchmark::State& state) {
  const auto pts = box_points(state.range(0), 1);
  const auto queries = box_points(kQueries, 2);
  const BallTree tree = build_index(pts);
  for (auto _ : state) {
    for (const auto& q : queries) benchmark::DoNotOptimize(tree.nearest(q));
  }
  state.SetItemsProcessed(state.iterations() * kQueries);
}

void BM_BatchTreeOmp(benchmark::State& state) {
  const auto pts = box_points(state.range(0), 1);
  const auto queries = box_points(kQueries, 2);
  const BallTree tree = build_index(pts);
  for (auto _ : state) benchmark::DoNotOptimize(nearest_batch(tree, queries));
  state.SetItemsProcessed(state.iterations() * kQueries);
}

// Single query, scan split across threads.
void BM_SingleBruteSerial(benchmark::State& state) {
  const auto pts = box_points(state.range(0), 1);
  const GeoPoint q(32.85, -117.25);
  for (auto _ : state) benchmark::DoNotOptimize(nearest_brute_force(pts, q));
}

void BM_SingleBruteOmp(benchmark::State& state) {
  const auto pts = box_points(state.range(0), 1);
  const GeoPoint q(32.85, -117.25);
  for (auto _ : state) benchmark::DoNotOptimize(nearest_brute_force_parallel(pts, q));
}

void BM_Build(benchmark::State& state) {
  const auto pts = box_points(state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(build_index(pts));
}

}  // namespace

BENCHMARK(BM_BatchBruteSerial)->RangeMultiplier(10)->Range(1'000, 100'000)->UseRealTime();
BENCHMARK(BM_BatchBruteOmp)->RangeMultiplier(10)->Range(1'000, 100'000)->UseRealTime();
BENCHMARK(BM_BatchTreeSerial)->RangeMultiplier(10)->Range(1'000, 100'000)->UseRealTime();
BENCHMARK(BM_BatchTreeOmp)->RangeMultiplier(10)->Range(1'000, 100'000)->UseRealTime();
BENCHMARK(BM_SingleBruteSerial)->RangeMultiplier(10)->Range(10'000, 1'000'000)->UseRealTime();
BENCHMARK(BM_SingleBruteOmp)->RangeMultiplier(10)->Range(10'000, 1'000'000)->UseRealTime();
BENCHMARK(BM_Build)->RangeMultiplier(10)->Range(1'000, 100'000);

BENCHMARK_MAIN();
