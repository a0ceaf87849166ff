#include "plume/graph_io.hpp"

#include <fstream>
#include <sstream>

#include "json_util.hpp"
#include "plume/error.hpp"

namespace plume {

using nlohmann::json;
using namespace detail;

json graph_config_to_json(const GraphConfig& c) {
  return json{
      {"node_count_target", c.node_count_target},
      {"radius_min", c.radius_min},
      {"radius_max", c.radius_max},
      {"children_min", c.children_min},
      {"children_max", c.children_max},
      {"branch_death_prob", c.branch_death_prob},
      {"forbidden_half_angle_deg", c.forbidden_half_angle_deg},
      {"distribution",
       {{"kind", std::string(to_string(c.distribution.kind))},
        {"sigma_deg", c.distribution.sigma_deg},
        {"perlin_frequency", c.distribution.perlin_frequency},
        {"blend", c.distribution.blend}}},
      {"layers", c.layers},
      {"layer_spacing", c.layer_spacing},
      {"max_interconnect_angle_deg", c.max_interconnect_angle_deg},
      {"interconnect_per_layer", c.interconnect_per_layer},
      {"elevation_amplitude", c.elevation_amplitude},
      {"elevation_frequency", c.elevation_frequency},
      {"seed", c.seed},
  };
}

GraphConfig graph_config_from_json(const json& j, std::string_view path) {
  expect_object(j, path);
  reject_unknown_keys(j, path,
                      {"node_count_target", "radius_min", "radius_max", "children_min", "children_max",
                       "branch_death_prob", "forbidden_half_angle_deg", "distribution", "layers", "layer_spacing",
                       "max_interconnect_angle_deg", "interconnect_per_layer", "elevation_amplitude",
                       "elevation_frequency", "seed"});
  GraphConfig c;
  read_optional(j, path, "node_count_target", c.node_count_target, as_u32);
  read_optional(j, path, "radius_min", c.radius_min, as_number);
  read_optional(j, path, "radius_max", c.radius_max, as_number);
  read_optional(j, path, "children_min", c.children_min, as_u32);
  read_optional(j, path, "children_max", c.children_max, as_u32);
  read_optional(j, path, "branch_death_prob", c.branch_death_prob, as_number);
  read_optional(j, path, "forbidden_half_angle_deg", c.forbidden_half_angle_deg, as_number);
  if (const auto it = j.find("distribution"); it != j.end()) {
    const std::string dpath = join(path, "distribution");
    expect_object(*it, dpath);
    reject_unknown_keys(*it, dpath, {"kind", "sigma_deg", "perlin_frequency", "blend"});
    if (const auto k = it->find("kind"); k != it->end()) {
      try {
        c.distribution.kind = distribution_kind_from_string(as_string(*k, join(dpath, "kind")));
      } catch (const ParseError&) {
        throw;
      } catch (const ConfigError& e) {
        throw ParseError(join(dpath, "kind") + ": " + e.what());
      }
    }
    read_optional(*it, dpath, "sigma_deg", c.distribution.sigma_deg, as_number);
    read_optional(*it, dpath, "perlin_frequency", c.distribution.perlin_frequency, as_number);
    read_optional(*it, dpath, "blend", c.distribution.blend, as_number);
  }
  read_optional(j, path, "layers", c.layers, as_u32);
  read_optional(j, path, "layer_spacing", c.layer_spacing, as_number);
  read_optional(j, path, "max_interconnect_angle_deg", c.max_interconnect_angle_deg, as_number);
  read_optional(j, path, "interconnect_per_layer", c.interconnect_per_layer, as_u32);
  read_optional(j, path, "elevation_amplitude", c.elevation_amplitude, as_number);
  read_optional(j, path, "elevation_frequency", c.elevation_frequency, as_number);
  read_optional(j, path, "seed", c.seed, as_u64);
  return c;
}

json graph_to_json(const Graph& graph, const GraphConfig& config) {
  json nodes = json::array();
  for (const Node& n : graph.nodes) {
    json node{
        {"id", n.id},
        {"parent", n.parent ? json(*n.parent) : json(nullptr)},
        {"edges", n.edges},
        {"coordinates", json::array({n.coordinates.x, n.coordinates.y, n.coordinates.z})},
        {"radius", n.radius},
        {"active", n.active},
        {"layer", n.layer},
    };
    if (n.connector) node["connector"] = true;
    nodes.push_back(std::move(node));
  }
  return json{{"version", kGraphManifestVersion}, {"config", graph_config_to_json(config)}, {"nodes", std::move(nodes)}};
}

std::pair<Graph, GraphConfig> json_to_graph(const json& document) {
  expect_object(document, "");
  reject_unknown_keys(document, "", {"version", "config", "nodes"});
  const int version = as_int(require_key(document, "", "version"), "/version");
  if (version != kGraphManifestVersion) {
    throw ParseError("/version: unsupported graph manifest version " + std::to_string(version));
  }
  GraphConfig config = graph_config_from_json(require_key(document, "", "config"), "/config");
  try {
    config.validate("/config");
  } catch (const ConfigError& e) {
    throw ParseError(e.what());
  }

  const json& nodes = require_key(document, "", "nodes");
  if (!nodes.is_array()) throw ParseError("/nodes: expected an array");
  Graph graph;
  graph.layers = config.layers;
  graph.seed = config.seed;
  graph.nodes.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string path = "/nodes/" + std::to_string(i);
    const json& jn = nodes[i];
    expect_object(jn, path);
    reject_unknown_keys(jn, path, {"id", "parent", "edges", "coordinates", "radius", "active", "layer", "connector"});
    Node n;
    n.id = as_u32(require_key(jn, path, "id"), path + "/id");
    const json& parent = require_key(jn, path, "parent");
    if (!parent.is_null()) n.parent = as_u32(parent, path + "/parent");
    const json& edges = require_key(jn, path, "edges");
    if (!edges.is_array()) throw ParseError(path + "/edges: expected an array");
    for (std::size_t e = 0; e < edges.size(); ++e) {
      n.edges.push_back(as_u32(edges[e], path + "/edges/" + std::to_string(e)));
    }
    const json& coords = require_key(jn, path, "coordinates");
    if (!coords.is_array() || coords.size() != 3) throw ParseError(path + "/coordinates: expected [x, y, z]");
    n.coordinates = {as_number(coords[0], path + "/coordinates/0"), as_number(coords[1], path + "/coordinates/1"),
                     as_number(coords[2], path + "/coordinates/2")};
    n.radius = as_number(require_key(jn, path, "radius"), path + "/radius");
    n.active = as_bool(require_key(jn, path, "active"), path + "/active");
    n.layer = as_u32(require_key(jn, path, "layer"), path + "/layer");
    read_optional(jn, path, "connector", n.connector, as_bool);
    graph.nodes.push_back(std::move(n));
  }
  validate_graph(graph, config);
  return {std::move(graph), config};
}

void validate_graph(const Graph& graph, const GraphConfig& config) {
  const std::size_t n = graph.nodes.size();
  if (n == 0) throw ValidationError("/nodes: graph has no nodes");
  std::size_t roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Node& node = graph.nodes[i];
    const std::string path = "/nodes/" + std::to_string(i);
    if (node.id != i) throw ValidationError(path + "/id: expected " + std::to_string(i));
    if (node.layer >= graph.layers) throw ValidationError(path + "/layer: exceeds layer count");
    if (!(node.radius >= config.radius_min && node.radius <= config.radius_max)) {
      throw ValidationError(path + "/radius: outside [radius_min, radius_max]");
    }
    if (!node.parent) {
      ++roots;
      if (!(node.coordinates == Vec3{0.0, 0.0, 0.0})) {
        throw ValidationError(path + ": the origin (parent null) must sit at (0, 0, 0)");
      }
    } else {
      const NodeId p = *node.parent;
      if (p >= n) throw ValidationError(path + "/parent: dangling parent " + std::to_string(p));
      if (p == node.id) throw ValidationError(path + "/parent: node is its own parent");
      if (!std::binary_search(node.edges.begin(), node.edges.end(), p)) {
        throw ValidationError(path + "/parent: no edge to parent " + std::to_string(p));
      }
    }
    for (std::size_t e = 0; e < node.edges.size(); ++e) {
      const NodeId other = node.edges[e];
      const std::string epath = path + "/edges/" + std::to_string(e);
      if (other >= n) throw ValidationError(epath + ": dangling edge to " + std::to_string(other));
      if (other == node.id) throw ValidationError(epath + ": self-edge");
      if (e > 0 && node.edges[e - 1] >= other) throw ValidationError(epath + ": edges must be sorted and unique");
      const auto& back = graph.nodes[other].edges;
      if (!std::binary_search(back.begin(), back.end(), node.id)) {
        throw ValidationError(epath + ": edge " + std::to_string(node.id) + "->" + std::to_string(other) +
                              " has no reverse " + std::to_string(other) + "->" + std::to_string(node.id));
      }
    }
  }
  if (roots != 1) throw ValidationError("/nodes: expected exactly one origin, found " + std::to_string(roots));

  // Parent chains must terminate at the origin without cycles.
  std::vector<int> state(n, 0);  // 0 unknown, 1 on stack, 2 reaches origin
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> chain;
    std::size_t cur = i;
    while (state[cur] == 0) {
      state[cur] = 1;
      chain.push_back(cur);
      if (!graph.nodes[cur].parent) break;
      cur = *graph.nodes[cur].parent;
    }
    if (state[cur] == 1 && graph.nodes[cur].parent) {
      throw ValidationError("/nodes/" + std::to_string(cur) + "/parent: parent links form a cycle");
    }
    for (const std::size_t c : chain) state[c] = 2;
  }
  if (component_count(graph) != 1) throw ValidationError("/nodes: graph is not connected");
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

void write_text_file(const std::filesystem::path& file, const std::string& content) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + file.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("failed writing " + file.string());
}

std::string read_text_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_graph_manifest(const std::filesystem::path& file, const Graph& graph, const GraphConfig& config) {
  write_text_file(file, dump_json(graph_to_json(graph, config)));
}

std::pair<Graph, GraphConfig> read_graph_manifest(const std::filesystem::path& file) {
  json doc;
  try {
    doc = json::parse(read_text_file(file));
  } catch (const json::parse_error& e) {
    throw ParseError(file.string() + ": " + e.what());
  }
  return json_to_graph(doc);
}

}  // namespace plume
