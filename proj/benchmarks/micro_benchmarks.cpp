#include <benchmark/benchmark.h>

#include "plume/config.hpp"
#include "plume/mesh.hpp"
#include "plume/noise.hpp"
#include "plume/texture.hpp"

namespace {

using namespace plume;

void BM_Perlin3(benchmark::State& state) {
  NoiseParams p{7, 0.35, static_cast<int>(state.range(0)), 2.0, 0.5};
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(perlin3({x, 0.37 * x, 1.3}, p));
    x += 0.013;
  }
}
BENCHMARK(BM_Perlin3)->Arg(1)->Arg(4);

void BM_Voronoi3(benchmark::State& state) {
  NoiseParams p{7, 0.22, 1, 2.0, 0.5};
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(voronoi3({x, 0.37 * x, 1.3}, p));
    x += 0.013;
  }
}
BENCHMARK(BM_Voronoi3);

void BM_MaterialEval(benchmark::State& state) {
  const MaterialParams m = default_config(3).material;
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(material_eval({x, 0.37 * x, 1.3}, {0, 0, 1}, m));
    x += 0.013;
  }
}
BENCHMARK(BM_MaterialEval);

void BM_GenerateGraph(benchmark::State& state) {
  PipelineConfig c = default_config(5);
  c.graph.node_count_target = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate_graph(c.graph));
}
BENCHMARK(BM_GenerateGraph)->Arg(50)->Arg(250)->Unit(benchmark::kMillisecond);

struct MeshFixture {
  Graph graph;
  MeshConfig config;
  TriMesh skin;
  MeshFixture() {
    PipelineConfig c = default_config(5);
    c.graph.node_count_target = 50;
    graph = generate_graph(c.graph);
    config = c.mesh;
    skin = skin_graph(graph, config);
  }
};

const MeshFixture& fixture() {
  static const MeshFixture f;
  return f;
}

void BM_SkinGraph(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(skin_graph(f.graph, f.config));
}
BENCHMARK(BM_SkinGraph)->Unit(benchmark::kMillisecond);

void BM_Smooth(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(smooth_mesh(f.skin, f.config));
}
BENCHMARK(BM_Smooth)->Unit(benchmark::kMillisecond);

void BM_Decimate(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(decimate(f.skin, f.config));
}
BENCHMARK(BM_Decimate)->Unit(benchmark::kMillisecond);

void BM_Bake(benchmark::State& state) {
  const auto& f = fixture();
  const int res = static_cast<int>(state.range(0));
  const UvAtlas atlas = build_uv_atlas(f.skin, res);
  const MaterialParams m = default_config(5).material;
  for (auto _ : state) benchmark::DoNotOptimize(bake_chunk(f.skin, atlas, m, res));
}
BENCHMARK(BM_Bake)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
