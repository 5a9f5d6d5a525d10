// Serial reference vs OpenMP kernels: per-unit sampling and mixed Voronoi areas.

#include "meshpatch/sampler.hpp"
#include "meshpatch/shapes.hpp"
#include "meshpatch/simplify.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

namespace {

using namespace meshpatch;

struct Fixture {
  SimplificationTrace trace;
  SubdividedTopology topo;

  static const Fixture& get() {
    static const Fixture f = [] {
      Fixture x;
      x.trace = simplify_to(normalize_unit_box(shapes::icosphere(4)).mesh, 256, 1);
      x.topo = subdivide(x.trace.coarse, 3);
      return x;
    }();
    return f;
  }
};

SelectionConfig selection(int k) {
  SelectionConfig c;
  c.k = k;
  c.seed = 7;
  return c;
}

void BM_SampleSerial(benchmark::State& state) {
  const Fixture& f = Fixture::get();
  const SelectionConfig cfg = selection(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::sample_mesh_features(f.trace, f.topo, cfg));
  state.SetItemsProcessed(state.iterations() * f.topo.unit_count());
}

void BM_SampleParallel(benchmark::State& state) {
  const Fixture& f = Fixture::get();
  const SelectionConfig cfg = selection(static_cast<int>(state.range(0)));
  omp_set_num_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(sample_mesh_features(f.trace, f.topo, cfg));
  state.SetItemsProcessed(state.iterations() * f.topo.unit_count());
}

void BM_VoronoiSerial(benchmark::State& state) {
  const IndexedMesh m = shapes::icosphere(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::mixed_voronoi_areas(m));
  state.SetItemsProcessed(state.iterations() * m.num_faces());
}

void BM_VoronoiParallel(benchmark::State& state) {
  const IndexedMesh m = shapes::icosphere(static_cast<int>(state.range(0)));
  omp_set_num_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(mixed_voronoi_areas(m));
  state.SetItemsProcessed(state.iterations() * m.num_faces());
}

BENCHMARK(BM_SampleSerial)->Arg(1)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleParallel)->ArgsProduct({{1, 16}, {1, 2, 4, 8}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_VoronoiSerial)->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VoronoiParallel)->ArgsProduct({{5, 6}, {1, 2, 4, 8}})->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
