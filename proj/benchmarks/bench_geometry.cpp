#include <benchmark/benchmark.h>

#include "sobexlab/geometry.hpp"
#include "sobexlab/rng.hpp"

using namespace sobexlab;

static void BM_Classify(benchmark::State& state) {
  const auto spec = geometry::build_mushroom(3, 5, 1, state.range(0));
  const CounterRng rng(1, 2);
  std::vector<Point> pts;
  for (int i = 0; i < 4096; ++i)
    pts.push_back({rng.uniform(i, 0), rng.uniform(i, 1), 3 * rng.uniform(i, 2)});
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(geometry::classify(spec, pts[i++ & 4095]));
  }
}
BENCHMARK(BM_Classify)->Arg(4)->Arg(12)->Arg(30);

static void BM_ValidatePlacement(benchmark::State& state) {
  const auto spec = geometry::build_mushroom(3, 5, 1, state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(geometry::validate_placement(spec));
}
BENCHMARK(BM_ValidatePlacement)->Arg(12)->Arg(30);
