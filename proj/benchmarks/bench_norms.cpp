#include <benchmark/benchmark.h>

#include "sobexlab/extension.hpp"
#include "sobexlab/fields.hpp"
#include "sobexlab/norms.hpp"

using namespace sobexlab;

static norms::QuadratureSpec bench_quad(bool mc) {
  norms::QuadratureSpec q;
  q.method = mc ? norms::QuadMethod::MonteCarlo
                : norms::QuadMethod::TensorCylindrical;
  q.mc_samples = 50000;
  q.estimate_error = false;
  return q;
}

static void BM_LpNormCubeTensor(benchmark::State& state) {
  const auto spec = geometry::build_mushroom(3, 5, 1, 2);
  const auto u = fields::make_poly(2, 3);
  for (auto _ : state)
    benchmark::DoNotOptimize(norms::lp_norm(
        spec, u, {geometry::tag_cube()}, 2.0, bench_quad(false)));
}
BENCHMARK(BM_LpNormCubeTensor);

static void BM_CollarSeminormTensor(benchmark::State& state) {
  const auto spec = geometry::build_mushroom(3, 5, 1, 2);
  const auto eu = extension::extend(spec, fields::make_poly(2, 3));
  for (auto _ : state)
    benchmark::DoNotOptimize(norms::sobolev_seminorm(
        spec, eu, {geometry::tag_head_collar(1)}, 1.0, bench_quad(false)));
}
BENCHMARK(BM_CollarSeminormTensor);

static void BM_LpNormSlabMC(benchmark::State& state) {
  const auto spec = geometry::build_mushroom(3, 5, 1, 4);
  const auto eu = extension::extend(spec, fields::make_trig(1.0, 3));
  for (auto _ : state)
    benchmark::DoNotOptimize(norms::lp_norm(
        spec, eu, {geometry::tag_slab()}, 1.0, bench_quad(true)));
}
BENCHMARK(BM_LpNormSlabMC);
