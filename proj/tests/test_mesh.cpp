#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <tuple>

#include "oracles.hpp"
#include "plume/error.hpp"
#include "plume/graph.hpp"
#include "plume/mesh.hpp"
#include "plume/parallel.hpp"

using namespace plume;

namespace {

const Graph& capsule() {
  static const Graph g = oracle::capsule_graph({0.0, 0.0, 0.0}, {10.0, 0.0, 0.0}, 2.0);
  return g;
}

MeshConfig capsule_config(double voxel = 0.25) {
  MeshConfig c;
  c.voxel_size = voxel;
  c.radius_scale = 1.0;
  return c;
}

double max_abs_sdf(const TriMesh& m) {
  double worst = 0.0;
  for (const Vec3& p : m.positions) {
    worst = std::max(worst, std::abs(oracle::tapered_capsule(p, {0.0, 0.0, 0.0}, {10.0, 0.0, 0.0}, 2.0, 2.0)));
  }
  return worst;
}

TriMesh tetrahedron() {
  TriMesh m;
  m.positions = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  m.triangles = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
  m.closed = true;
  return m;
}

const TriMesh& multi_mesh() {
  static const TriMesh m = [] {
    GraphConfig gc;
    gc.seed = 5;
    gc.node_count_target = 60;
    gc.layers = 3;
    MeshConfig mc;
    return decimate(smooth_mesh(skin_graph(generate_graph(gc), mc), mc), mc).mesh;
  }();
  return m;
}

}  // namespace

TEST_CASE("sdf_eval on a uniform capsule") {
  CHECK(sdf_eval(capsule(), 1.0, {5.0, 0.0, 0.0}) == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(sdf_eval(capsule(), 1.0, {5.0, 2.0, 0.0}) == doctest::Approx(0.0).scale(1e-15));
  CHECK(sdf_eval(capsule(), 1.0, {-3.0, 0.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("sdf_eval matches a per-edge brute force") {
  GraphConfig gc;
  gc.seed = 17;
  gc.node_count_target = 40;
  gc.layers = 2;
  const Graph g = generate_graph(gc);
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const Vec3 p{rng.uniform(-60, 60), rng.uniform(-60, 60), rng.uniform(-30, 5)};
    CHECK(std::abs(sdf_eval(g, 0.35, p) - oracle::graph_sdf(g, 0.35, p)) <= 1e-12);
  }
}

TEST_CASE("validate_mesh on known polytopes") {
  const MeshReport full = validate_mesh(tetrahedron());
  CHECK(full.closed());
  CHECK(full.components == 1);
  CHECK(full.euler_characteristic == 2);

  TriMesh open = tetrahedron();
  open.triangles.pop_back();
  const MeshReport r = validate_mesh(open);
  CHECK(r.boundary_edges == 3);
  CHECK_FALSE(r.closed());

  TriMesh flipped = tetrahedron();
  std::swap(flipped.triangles[0][1], flipped.triangles[0][2]);
  CHECK(validate_mesh(flipped).misoriented_edges > 0);

  TriMesh broken = tetrahedron();
  broken.triangles[0][0] = 99;
  CHECK(validate_mesh(broken).invalid_indices == 1);
}

TEST_CASE("marching cubes skins a capsule into a sphere-like surface") {
  const TriMesh m = skin_graph(capsule(), capsule_config());
  const oracle::Topology t = oracle::topology(m);
  CHECK(t.closed_manifold());
  CHECK(t.euler() == 2);
  CHECK(validate_mesh(m).closed());
  CHECK(validate_mesh(m).components == 1);
  CHECK(max_abs_sdf(m) <= 0.25 * std::sqrt(3.0));
  CHECK(m.volume() > 0.0);
  CHECK(m.normals.size() == m.positions.size());
}

TEST_CASE("halving the voxel roughly quadruples the vertex count") {
  const double coarse = static_cast<double>(skin_graph(capsule(), capsule_config(0.4)).positions.size());
  const double fine = static_cast<double>(skin_graph(capsule(), capsule_config(0.2)).positions.size());
  const double ratio = fine / coarse;
  CHECK(ratio >= 3.0);
  CHECK(ratio <= 5.0);
}

TEST_CASE("skinning is independent of the thread count") {
  set_thread_count(1);
  const TriMesh one = skin_graph(capsule(), capsule_config());
  set_thread_count(4);
  const TriMesh four = skin_graph(capsule(), capsule_config());
  set_thread_count(0);
  CHECK(one == four);
}

TEST_CASE("the cell budget guards skinning") {
  MeshConfig c = capsule_config(0.05);
  c.cell_budget = 1000;
  CHECK_THROWS_AS(skin_graph(capsule(), c), ResourceLimitError);
}

TEST_CASE("smoothing moves vertices only") {
  const MeshConfig c = capsule_config();
  const TriMesh raw = skin_graph(capsule(), c);

  MeshConfig none = c;
  none.smooth_iterations = 0;
  CHECK(smooth_mesh(raw, none) == raw);

  const TriMesh smooth = smooth_mesh(raw, c);
  CHECK(smooth.positions.size() == raw.positions.size());
  CHECK(smooth.triangles == raw.triangles);
  CHECK(max_abs_sdf(smooth) <= max_abs_sdf(raw) + c.voxel_size);

  TriMesh open = raw;
  open.closed = false;
  CHECK_THROWS_AS(smooth_mesh(open, c), ContractViolation);
}

TEST_CASE("decimation reaches its budget on a dense capsule") {
  const MeshConfig c = capsule_config(0.125);
  const TriMesh dense = smooth_mesh(skin_graph(capsule(), c), c);
  REQUIRE(dense.triangles.size() >= 10000);
  const DecimationResult d = decimate(dense, c);
  CHECK(d.input_triangles == dense.triangles.size());
  CHECK(d.mesh.triangles.size() <= static_cast<std::size_t>(0.26 * static_cast<double>(dense.triangles.size())));
  const oracle::Topology t = oracle::topology(d.mesh);
  CHECK(t.closed_manifold());
  CHECK(t.euler() == 2);
  CHECK(max_abs_sdf(d.mesh) <= 2.0 * c.voxel_size);

  MeshConfig keep = c;
  keep.decimate_ratio = 1.0;
  CHECK(decimate(dense, keep).mesh == dense);
}

TEST_CASE("decimation refuses open meshes") {
  TriMesh open = tetrahedron();
  open.triangles.pop_back();
  open.closed = false;
  CHECK_THROWS_AS(decimate(open, capsule_config()), ContractViolation);
}

TEST_CASE("mesh config invariants") {
  MeshConfig c;
  CHECK_NOTHROW(c.validate());
  c.taubin_mu = -0.4;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = MeshConfig{};
  c.decimate_ratio = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = MeshConfig{};
  c.chunk_grid = {0, 1, 1};
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("a 1x1x1 grid returns the input as a single chunk") {
  const MeshConfig c = capsule_config();
  const TriMesh m = skin_graph(capsule(), c);
  const auto chunks = chunk_mesh(m, c, 1);
  REQUIRE(chunks.size() == 1);
  CHECK(chunks[0].mesh.positions == m.positions);
  CHECK(chunks[0].mesh.triangles == m.triangles);
}

TEST_CASE("single-layer caves never split along z") {
  MeshConfig c;
  c.chunk_grid = {2, 2, 2};
  CHECK(effective_chunk_grid(c, 1)[2] == 1);
  CHECK(effective_chunk_grid(c, 3)[2] == 2);
  c.chunk_grid = {2, 2, 4};
  CHECK(effective_chunk_grid(c, 3)[2] == 3);
}

TEST_CASE("chunking conserves area and respects cell bounds") {
  const TriMesh& m = multi_mesh();
  const double before = oracle::total_area(m);
  for (const std::array<int, 3> grid : {std::array<int, 3>{2, 2, 1}, {2, 2, 2}, {3, 2, 3}}) {
    MeshConfig c;
    c.chunk_grid = grid;
    const auto chunks = chunk_mesh(m, c, 3);
    double after = 0.0;
    for (const Chunk& ch : chunks) {
      after += oracle::total_area(ch.mesh);
      CHECK(validate_mesh(ch.mesh).valid());
      for (const Vec3& p : ch.mesh.positions) CHECK(ch.bounds.contains(p, 1e-6));
    }
    CHECK(std::abs(after - before) <= 1e-3 * before);
    CHECK(chunks.size() <= static_cast<std::size_t>(grid[0] * grid[1] * grid[2]));
  }
}

TEST_CASE("chunk order is i fastest, then j, then k") {
  MeshConfig c;
  c.chunk_grid = {2, 2, 2};
  const auto chunks = chunk_mesh(multi_mesh(), c, 3);
  for (std::size_t i = 1; i < chunks.size(); ++i) {
    const auto& a = chunks[i - 1].index;
    const auto& b = chunks[i].index;
    CHECK(std::make_tuple(a[2], a[1], a[0]) < std::make_tuple(b[2], b[1], b[0]));
  }
}

TEST_CASE("pipeline-shaped capsule output is closed and connected") {
  const MeshConfig c = capsule_config();
  const TriMesh m = decimate(smooth_mesh(skin_graph(capsule(), c), c), c).mesh;
  const MeshReport r = validate_mesh(m);
  CHECK(r.closed());
  CHECK(r.components == 1);
  CHECK(r.degenerate_triangles == 0);
}
