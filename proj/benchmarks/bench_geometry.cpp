#include <benchmark/benchmark.h>

#include "roomforge/geometry.hpp"
#include "roomforge/rng.hpp"

namespace {

using roomforge::OrientedBox;

std::vector<std::pair<OrientedBox, OrientedBox>> box_pairs(int n) {
  roomforge::Rng rng(42);
  std::vector<std::pair<OrientedBox, OrientedBox>> pairs;
  pairs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto mk = [&] {
      return OrientedBox::make(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-1, 1),
                               rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0),
                               rng.uniform(0.1, 1.0), rng.uniform(0.0, 6.28));
    };
    pairs.emplace_back(mk(), mk());
  }
  return pairs;
}

void BM_FootprintOverlapArea(benchmark::State& state) {
  const auto pairs = box_pairs(256);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [a, b] = pairs[i++ & 255];
    benchmark::DoNotOptimize(footprint_overlap_area(a, b));
  }
}
BENCHMARK(BM_FootprintOverlapArea);

void BM_BoxesIntersect3d(benchmark::State& state) {
  const auto pairs = box_pairs(256);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [a, b] = pairs[i++ & 255];
    benchmark::DoNotOptimize(boxes_intersect_3d(a, b));
  }
}
BENCHMARK(BM_BoxesIntersect3d);

}  // namespace
