#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "kwe/collision.hpp"
#include "kwe/separable.hpp"
#include "kwe/transport.hpp"

using namespace kwe;

static void BM_CollisionKernel(benchmark::State &bm) {
  const int n = static_cast<int>(bm.range(0));
  const VelocityGrid grid(6.0, n);
  const SphereQuadrature q = make_sphere_quadrature(8, 16);
  const auto f = SeparableProfile::isotropic_gaussian(0.01, {0.2, -0.1, 0.0}, 1.0).sample(grid);
  const CollisionInput in = CollisionInput::from_grid(grid, f, f, f);
  KernelOptions opt;
  opt.compensated = bm.range(1) != 0;
  for (auto _ : bm) {
    CollisionTerms t = collision_kernel(in, q, kAllTerms, opt);
    benchmark::DoNotOptimize(t.gain1.data());
  }
  bm.SetItemsProcessed(static_cast<std::int64_t>(bm.iterations()) *
                       static_cast<std::int64_t>(kernel_active_triples(grid, q)));
}
BENCHMARK(BM_CollisionKernel)
    ->ArgsProduct({{9, 13, 17}, {1, 0}})
    ->ArgNames({"n", "compensated"})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

static void BM_Transport1D(benchmark::State &bm) {
  const int nx = static_cast<int>(bm.range(0));
  const auto g = make_grid(SpatialGrid(1, 20.0, nx), VelocityGrid(3.0, 17));
  DistributionField f(g);
  for (std::size_t ix = 0; ix < g->x.size(); ++ix) {
    const double x = g->x.node(ix).x;
    for (std::size_t iv = 0; iv < g->v.size(); ++iv) f.at(ix, iv) = std::exp(-0.5 * x * x);
  }
  for (auto _ : bm) {
    DistributionField s = apply_transport(f, 0.37);
    benchmark::DoNotOptimize(s.values().data());
  }
  bm.SetItemsProcessed(static_cast<std::int64_t>(bm.iterations()) * static_cast<std::int64_t>(g->size()));
}
BENCHMARK(BM_Transport1D)->Arg(64)->Arg(256)->Arg(1024)->UseRealTime();

static void BM_SeparableMoments(benchmark::State &bm) {
  const VelocityGrid grid(6.0, static_cast<int>(bm.range(0)));
  const SphereQuadrature q = make_sphere_quadrature(8, 16);
  const auto p = SeparableProfile::isotropic_gaussian(0.01, {0.2, -0.1, 0.0}, 1.0);
  for (auto _ : bm) {
    OperatorMoments m = separable_moments(grid, q, p, p, p, SeparableMode::analytic);
    benchmark::DoNotOptimize(m.gain1.data());
  }
}
BENCHMARK(BM_SeparableMoments)->Arg(9)->Arg(17)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
