#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numeric>

#include "oracles.hpp"
#include "plume/error.hpp"
#include "plume/graph.hpp"
#include "plume/graph_io.hpp"
#include "plume/mesh.hpp"

using namespace plume;

namespace {

GraphConfig small_config(std::uint64_t seed, std::uint32_t nodes = 100, std::uint32_t layers = 1) {
  GraphConfig c;
  c.seed = seed;
  c.node_count_target = nodes;
  c.layers = layers;
  return c;
}

std::size_t union_find_components(const Graph& g) {
  std::vector<std::size_t> parent(g.nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Node& n : g.nodes) {
    for (const NodeId e : n.edges) parent[find(n.id)] = find(e);
  }
  std::size_t roots = 0;
  for (std::size_t i = 0; i < parent.size(); ++i) roots += find(i) == i;
  return roots;
}

bool bitwise_equal(const Vec3& a, const Vec3& b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("a one-node target yields only the origin") {
  const Graph g = generate_graph(small_config(1, 1));
  REQUIRE(g.nodes.size() == 1);
  CHECK(g.nodes[0].coordinates == Vec3{0.0, 0.0, 0.0});
  CHECK(g.nodes[0].edges.empty());
  CHECK_FALSE(g.nodes[0].parent.has_value());
}

TEST_CASE("graph generation is deterministic per seed") {
  for (const std::uint32_t layers : {1u, 3u}) {
    const Graph a = generate_graph(small_config(7, 120, layers));
    const Graph b = generate_graph(small_config(7, 120, layers));
    REQUIRE(a.nodes.size() == b.nodes.size());
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
      CHECK(a.nodes[i].parent == b.nodes[i].parent);
      CHECK(a.nodes[i].edges == b.nodes[i].edges);
      CHECK(bitwise_equal(a.nodes[i].coordinates, b.nodes[i].coordinates));
    }
    CHECK_FALSE(a == generate_graph(small_config(8, 120, layers)));
  }
}

TEST_CASE("generated graphs reach the node target and stay connected") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = generate_graph(small_config(seed, 80));
    std::size_t growth = 0;
    for (const Node& n : g.nodes) growth += !n.connector;
    CHECK(growth >= 80);
    CHECK(union_find_components(g) == 1);
    CHECK_NOTHROW(validate_graph(g, small_config(seed, 80)));
  }
}

TEST_CASE("expand_node with no children only deactivates") {
  GraphConfig c = small_config(1, 5);
  c.children_min = c.children_max = 0;
  Graph g;
  Node origin;
  origin.radius = 5.0;
  origin.active = true;
  g.nodes.push_back(origin);
  Rng rng(3);
  CHECK(expand_node(g, 0, c, rng).empty());
  CHECK_FALSE(g.nodes[0].active);
  CHECK_THROWS_AS(expand_node(g, 0, c, rng), ContractViolation);
}

TEST_CASE("children sit on a circle of the drawn step radius") {
  const GraphConfig c = small_config(2, 5);
  Graph g;
  Node origin;
  origin.radius = 6.0;
  origin.active = true;
  g.nodes.push_back(origin);
  for (int round = 0; round < 30; ++round) {
    Rng rng = Rng::stream(5, "t", static_cast<std::uint64_t>(round));
    std::vector<NodeId> frontier;
    for (const Node& n : g.nodes) {
      if (n.active) frontier.push_back(n.id);
    }
    for (const NodeId id : frontier) {
      for (const NodeId child : expand_node(g, id, c, rng)) {
        const Node& ch = g.nodes[child];
        CHECK(std::abs(planar_distance(ch.coordinates, g.nodes[id].coordinates) - ch.radius) < 1e-9);
        CHECK(ch.radius >= c.radius_min);
        CHECK(ch.radius <= c.radius_max);
      }
    }
  }
}

TEST_CASE("no child direction falls in the forbidden sector") {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const GraphConfig c = small_config(seed, 100);
    const Graph g = generate_graph(c);
    for (const Node& n : g.nodes) {
      if (n.connector || !n.parent) continue;
      const Node& p = g.nodes[*n.parent];
      if (!p.parent) continue;
      const Node& gp = g.nodes[*p.parent];
      const double angle = oracle::planar_angle_deg(n.coordinates.x - p.coordinates.x, n.coordinates.y - p.coordinates.y,
                                                    gp.coordinates.x - p.coordinates.x, gp.coordinates.y - p.coordinates.y);
      CHECK(angle > c.forbidden_half_angle_deg);
      ++checked;
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("angular distribution geometry") {
  GraphConfig c = small_config(4);
  Node n;
  n.id = 3;

  SUBCASE("the origin has no forced zeros") {
    c.distribution.kind = DistributionKind::kGaussian;
    const AngularWeights w = angular_distribution(n, std::nullopt, c);
    for (int i = 0; i < kAngularSections; ++i) CHECK(w[i] > 0.0);
  }
  SUBCASE("a parent due west blanks sections 120 to 240") {
    for (const auto kind : {DistributionKind::kGaussian, DistributionKind::kPerlin, DistributionKind::kHybrid}) {
      c.distribution.kind = kind;
      const AngularWeights w = angular_distribution(n, Vec2{-1.0, 0.0}, c);
      for (int i = 120; i <= 240; ++i) CHECK(w[i] == 0.0);
      CHECK(w[119] > 0.0);
      CHECK(w[241] > 0.0);
      CHECK(w.valid());
    }
  }
  SUBCASE("renormalized for arbitrary parents") {
    Rng rng(6);
    for (int i = 0; i < 1000; ++i) {
      n.id = static_cast<NodeId>(i);
      const double a = rng.uniform(0.0, 2.0 * kPi);
      const AngularWeights w = angular_distribution(n, Vec2{std::cos(a), std::sin(a)}, c);
      CHECK(std::abs(w.sum() - 1.0) < 1e-9);
    }
  }
  SUBCASE("a full forbidden circle is degenerate") {
    c.forbidden_half_angle_deg = 180.0;
    CHECK_THROWS_AS(angular_distribution(n, Vec2{1.0, 0.0}, c), DegenerateDistributionError);
  }
}

TEST_CASE("elevation is bounded, seeded and optional") {
  GraphConfig flat = small_config(9, 60);
  flat.elevation_amplitude = 0.0;
  const Graph base = generate_graph(flat);
  CHECK(apply_elevation(base, flat) == base);

  GraphConfig bumpy = flat;
  bumpy.elevation_amplitude = 2.5;
  const Graph lifted = apply_elevation(base, bumpy);
  for (std::size_t i = 0; i < base.nodes.size(); ++i) {
    CHECK(std::abs(lifted.nodes[i].coordinates.z - base.nodes[i].coordinates.z) <= bumpy.elevation_amplitude);
    CHECK(lifted.nodes[i].coordinates.x == base.nodes[i].coordinates.x);
  }
  CHECK(apply_elevation(base, bumpy) == lifted);
}

TEST_CASE("inter-layer passages respect the slope bound") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (const double max_angle : {30.0, 60.0, 85.0}) {
      GraphConfig c = small_config(seed, 90, 3);
      c.max_interconnect_angle_deg = max_angle;
      const Graph g = generate_graph(c);
      for (const Node& n : g.nodes) {
        for (const NodeId e : n.edges) {
          const Node& m = g.nodes[e];
          if (!(n.connector || m.connector || n.layer != m.layer)) continue;
          const double dz = std::abs(n.coordinates.z - m.coordinates.z);
          const double run = std::hypot(n.coordinates.x - m.coordinates.x, n.coordinates.y - m.coordinates.y);
          CHECK(std::atan2(dz, run) * 180.0 / kPi <= max_angle + 1e-9);
        }
      }
      CHECK(union_find_components(g) == 1);
      CHECK(component_count(g) == 1);
    }
  }
}

TEST_CASE("connect_layers needs two layers") {
  Rng rng(1);
  const GraphConfig c = small_config(1, 10);
  CHECK_THROWS_AS(connect_layers(generate_graph(c), c, rng), ContractViolation);
}

TEST_CASE("graph config validation names the keys") {
  GraphConfig c;
  c.radius_min = 10.0;
  c.radius_max = 5.0;
  try {
    c.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("radius_min") != std::string::npos);
    CHECK(msg.find("radius_max") != std::string::npos);
  }
  c = GraphConfig{};
  c.branch_death_prob = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("graph manifests round-trip losslessly") {
  const GraphConfig c = small_config(12, 150, 2);
  const Graph g = generate_graph(c);
  const auto dir = oracle::scratch_dir("graph_roundtrip");
  write_graph_manifest(dir / "graph.json", g, c);
  const auto [back, back_config] = read_graph_manifest(dir / "graph.json");
  CHECK(back == g);
  CHECK(back_config == c);
}

TEST_CASE("graph manifests are validated on load") {
  const GraphConfig c = small_config(1, 10);
  nlohmann::json doc = graph_to_json(generate_graph(c), c);

  SUBCASE("asymmetric edge") {
    const std::size_t last = doc["nodes"].size() - 1;
    REQUIRE(doc["nodes"][0]["edges"].back().get<std::size_t>() < last);
    doc["nodes"][0]["edges"].push_back(last);
    try {
      json_to_graph(doc);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("no reverse") != std::string::npos);
    }
  }
  SUBCASE("one-sided edge") {
    auto& edges1 = doc["nodes"][1]["edges"];
    edges1.erase(std::remove(edges1.begin(), edges1.end(), nlohmann::json(0)), edges1.end());
    CHECK_THROWS_AS(json_to_graph(doc), ValidationError);
  }
  SUBCASE("dangling parent") {
    doc["nodes"][1]["parent"] = 9999;
    CHECK_THROWS_AS(json_to_graph(doc), ValidationError);
  }
  SUBCASE("unknown key names its path") {
    doc["nodes"][2]["colour"] = "red";
    try {
      json_to_graph(doc);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("/nodes/2/colour") != std::string::npos);
    }
  }
  SUBCASE("wrong type") {
    doc["nodes"][0]["radius"] = "big";
    CHECK_THROWS_AS(json_to_graph(doc), ParseError);
  }
}

TEST_CASE("a hand-written manifest loads and meshes") {
  const auto [g, c] = read_graph_manifest(oracle::fs::path(PLUME_FIXTURE_DIR) / "three_node_graph.json");
  REQUIRE(g.nodes.size() == 3);
  CHECK(c.seed == 3);
  MeshConfig mc;
  const TriMesh m = skin_graph(g, mc);
  const MeshReport r = validate_mesh(m);
  CHECK(r.closed());
  CHECK(r.components == 1);
  CHECK(r.euler_characteristic == 2);
}
