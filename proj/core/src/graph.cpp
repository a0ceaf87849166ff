#include "plume/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <sstream>

#include "plume/error.hpp"
#include "plume/noise.hpp"

namespace plume {

namespace {

// Sections closer to the back-direction than the half-angle plus this margin are zeroed, so
// drawn directions clear the forbidden sector by more than floating-point noise.
constexpr double kForbiddenMarginDeg = 1e-7;

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

double direction_deg(const Vec2& d) {
  double a = rad_to_deg(std::atan2(d.y, d.x));
  if (a < 0.0) a += 360.0;
  return a;
}

double elevation_bound(const GraphConfig& config) {
  return std::min(config.elevation_amplitude, 0.45 * config.layer_spacing);
}

Node make_node(const Graph& graph, const Vec3& position, double radius, std::uint32_t layer) {
  Node n;
  n.id = static_cast<NodeId>(graph.nodes.size());
  n.coordinates = position;
  n.radius = radius;
  n.layer = layer;
  n.active = true;
  return n;
}

std::vector<NodeId> growth_nodes_in_layer(const Graph& graph, std::uint32_t layer, std::size_t limit) {
  std::vector<NodeId> ids;
  for (std::size_t i = 0; i < std::min(limit, graph.nodes.size()); ++i) {
    const Node& n = graph.nodes[i];
    if (!n.connector && n.layer == layer) ids.push_back(n.id);
  }
  return ids;
}

/// Breadth-first growth of one layer from `root` until the layer holds `target` nodes.
void grow_layer(Graph& graph, const GraphConfig& config, std::uint32_t layer, NodeId root, std::uint32_t target,
                std::uint64_t& expansion_counter) {
  std::deque<NodeId> frontier{root};
  std::size_t count = 1;
  Rng reseed = Rng::stream(config.seed, "reseed", layer);
  while (count < target) {
    if (frontier.empty()) {
      // Every branch died: restart from a uniformly chosen node of this layer.
      const auto candidates = growth_nodes_in_layer(graph, layer, graph.nodes.size());
      const NodeId pick = candidates[reseed.below(candidates.size())];
      graph.nodes[pick].active = true;
      frontier.push_back(pick);
    }
    const NodeId id = frontier.front();
    frontier.pop_front();
    if (!graph.nodes[id].active) continue;
    Rng rng = Rng::stream(config.seed, "expand", expansion_counter++);
    const auto children = expand_node(graph, id, config, rng);
    count += children.size();
    for (const NodeId c : children) {
      if (graph.nodes[c].active) frontier.push_back(c);
    }
  }
}

/// Inserts inactive connector nodes along the polyline from -> via... -> to.
std::vector<NodeId> insert_passage(Graph& graph, NodeId from, NodeId to, const std::vector<Vec3>& via,
                                   const GraphConfig& config, bool reparent_target) {
  std::vector<Vec3> path;
  path.push_back(graph.nodes[from].coordinates);
  path.insert(path.end(), via.begin(), via.end());
  path.push_back(graph.nodes[to].coordinates);

  const std::size_t legs = path.size() - 1;
  const auto min_segments = static_cast<std::size_t>(std::ceil(config.layer_spacing / config.radius_max)) + 1;
  const std::size_t min_per_leg = (min_segments + legs - 1) / legs;
  std::vector<double> leg_length(legs);
  double total_length = 0.0;
  for (std::size_t k = 0; k < legs; ++k) {
    leg_length[k] = distance(path[k], path[k + 1]);
    total_length += leg_length[k];
  }

  const double r_from = graph.nodes[from].radius;
  const double r_to = graph.nodes[to].radius;
  const std::uint32_t layer = graph.nodes[from].layer;
  std::vector<NodeId> inserted;
  double walked = 0.0;
  for (std::size_t k = 0; k < legs; ++k) {
    const auto by_length = static_cast<std::size_t>(std::ceil(leg_length[k] / config.radius_max));
    const std::size_t segments = std::max<std::size_t>({1, by_length, min_per_leg});
    // Interior points of the leg, plus the leg's end point when it is a via point.
    const std::size_t last = (k + 1 < legs) ? segments : segments - 1;
    for (std::size_t j = 1; j <= last; ++j) {
      const double t = static_cast<double>(j) / static_cast<double>(segments);
      const Vec3 p = lerp(path[k], path[k + 1], t);
      const double arc = total_length > 0.0 ? (walked + leg_length[k] * t) / total_length : 0.5;
      Node n = make_node(graph, p, std::clamp(lerp(r_from, r_to, arc), config.radius_min, config.radius_max), layer);
      n.active = false;
      n.connector = true;
      n.parent = inserted.empty() ? from : inserted.back();
      graph.nodes.push_back(std::move(n));
      const NodeId id = graph.nodes.back().id;
      add_edge(graph, *graph.nodes[id].parent, id);
      inserted.push_back(id);
    }
    walked += leg_length[k];
  }
  const NodeId tail = inserted.empty() ? from : inserted.back();
  add_edge(graph, tail, to);
  if (reparent_target) graph.nodes[to].parent = tail;
  return inserted;
}

}  // namespace

std::string_view to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::kGaussian:
      return "gaussian";
    case DistributionKind::kPerlin:
      return "perlin";
    case DistributionKind::kHybrid:
      return "hybrid";
  }
  return "hybrid";
}

DistributionKind distribution_kind_from_string(std::string_view name) {
  if (name == "gaussian") return DistributionKind::kGaussian;
  if (name == "perlin") return DistributionKind::kPerlin;
  if (name == "hybrid") return DistributionKind::kHybrid;
  throw ConfigError("distribution.kind must be one of gaussian, perlin, hybrid (got \"" + std::string(name) + "\")");
}

void GraphConfig::validate(std::string_view where) const {
  const std::string p = std::string(where) + ".";
  require(node_count_target >= 1, p + "node_count_target must be >= 1");
  require(radius_min > 0.0 && std::isfinite(radius_min), p + "radius_min must be > 0 (got " + num(radius_min) + ")");
  require(radius_min <= radius_max && std::isfinite(radius_max),
          p + "radius_min (" + num(radius_min) + ") must be <= " + p + "radius_max (" + num(radius_max) + ")");
  require(children_min <= children_max, p + "children_min (" + std::to_string(children_min) + ") must be <= " + p +
                                            "children_max (" + std::to_string(children_max) + ")");
  require(node_count_target == 1 || children_max >= 1,
          p + "children_max must be >= 1 when node_count_target > 1");
  require(branch_death_prob >= 0.0 && branch_death_prob <= 1.0,
          p + "branch_death_prob must be in [0, 1] (got " + num(branch_death_prob) + ")");
  require(forbidden_half_angle_deg > 0.0 && forbidden_half_angle_deg < 180.0,
          p + "forbidden_half_angle_deg must be in (0, 180) (got " + num(forbidden_half_angle_deg) + ")");
  require(distribution.sigma_deg > 0.0 && std::isfinite(distribution.sigma_deg),
          p + "distribution.sigma_deg must be > 0 (got " + num(distribution.sigma_deg) + ")");
  require(distribution.perlin_frequency > 0.0 && std::isfinite(distribution.perlin_frequency),
          p + "distribution.perlin_frequency must be > 0 (got " + num(distribution.perlin_frequency) + ")");
  require(distribution.blend >= 0.0 && distribution.blend <= 1.0,
          p + "distribution.blend must be in [0, 1] (got " + num(distribution.blend) + ")");
  require(layers >= 1, p + "layers must be >= 1");
  require(layer_spacing > 0.0 && std::isfinite(layer_spacing),
          p + "layer_spacing must be > 0 (got " + num(layer_spacing) + ")");
  require(max_interconnect_angle_deg > 0.0 && max_interconnect_angle_deg <= 90.0,
          p + "max_interconnect_angle_deg must be in (0, 90] (got " + num(max_interconnect_angle_deg) + ")");
  require(interconnect_per_layer >= 1, p + "interconnect_per_layer must be >= 1");
  require(elevation_amplitude >= 0.0 && std::isfinite(elevation_amplitude),
          p + "elevation_amplitude must be >= 0 (got " + num(elevation_amplitude) + ")");
  require(elevation_frequency > 0.0 && std::isfinite(elevation_frequency),
          p + "elevation_frequency must be > 0 (got " + num(elevation_frequency) + ")");
}

double layer_plane_z(std::uint32_t layer, const GraphConfig& config) {
  return -static_cast<double>(layer) * config.layer_spacing;
}

void add_edge(Graph& graph, NodeId a, NodeId b) {
  if (a == b) throw ContractViolation("self-edge on node " + std::to_string(a));
  auto insert_sorted = [](std::vector<NodeId>& v, NodeId x) {
    const auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it == v.end() || *it != x) v.insert(it, x);
  };
  insert_sorted(graph.nodes[a].edges, b);
  insert_sorted(graph.nodes[b].edges, a);
}

void remove_edge(Graph& graph, NodeId a, NodeId b) {
  auto erase_sorted = [](std::vector<NodeId>& v, NodeId x) {
    const auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it != v.end() && *it == x) v.erase(it);
  };
  erase_sorted(graph.nodes[a].edges, b);
  erase_sorted(graph.nodes[b].edges, a);
}

std::size_t component_count(const Graph& graph) {
  std::vector<std::size_t> parent(graph.nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  std::size_t components = graph.nodes.size();
  for (const Node& n : graph.nodes) {
    for (const NodeId e : n.edges) {
      if (e >= graph.nodes.size()) continue;
      const std::size_t ra = find(n.id);
      const std::size_t rb = find(e);
      if (ra != rb) {
        parent[ra] = rb;
        --components;
      }
    }
  }
  return components;
}

double slope_deg(const Vec3& a, const Vec3& b) {
  return rad_to_deg(std::atan2(std::abs(a.z - b.z), planar_distance(a, b)));
}

std::optional<Vec2> parent_direction(const Graph& graph, NodeId node_id) {
  const Node& node = graph.nodes.at(node_id);
  if (!node.parent) return std::nullopt;
  const Node& parent = graph.nodes.at(*node.parent);
  const Vec2 d{parent.coordinates.x - node.coordinates.x, parent.coordinates.y - node.coordinates.y};
  const double len = std::hypot(d.x, d.y);
  if (len < 1e-9) return std::nullopt;
  return Vec2{d.x / len, d.y / len};
}

AngularWeights angular_distribution(const Node& node, const std::optional<Vec2>& parent_dir,
                                    const GraphConfig& config) {
  if (config.forbidden_half_angle_deg >= 180.0) {
    throw DegenerateDistributionError("forbidden_half_angle_deg >= 180 leaves no admissible direction");
  }
  const auto& dist = config.distribution;
  auto perlin_part = [&] {
    return perlin_weights(hash_combine(config.seed, 0x70000000ull + node.id), dist.perlin_frequency);
  };

  AngularWeights base;
  if (parent_dir) {
    const double back = direction_deg(*parent_dir);
    const double outward = std::fmod(back + 180.0, 360.0);
    switch (dist.kind) {
      case DistributionKind::kGaussian:
        base = gaussian_weights(outward, dist.sigma_deg);
        break;
      case DistributionKind::kPerlin:
        base = perlin_part();
        break;
      case DistributionKind::kHybrid:
        base = hybrid_weights(gaussian_weights(outward, dist.sigma_deg), perlin_part(), dist.blend);
        break;
    }
  } else {
    // No continuation direction at the origin: the gaussian component degrades to uniform.
    switch (dist.kind) {
      case DistributionKind::kGaussian:
        break;
      case DistributionKind::kPerlin:
        base = perlin_part();
        break;
      case DistributionKind::kHybrid:
        base = hybrid_weights(AngularWeights{}, perlin_part(), dist.blend);
        break;
    }
    return base;
  }

  AngularWeights::Array raw = base.values();
  const double back = direction_deg(*parent_dir);
  for (int i = 0; i < kAngularSections; ++i) {
    if (circular_distance_deg(static_cast<double>(i), back) <= config.forbidden_half_angle_deg + kForbiddenMarginDeg) {
      raw[static_cast<std::size_t>(i)] = 0.0;
    }
  }
  return AngularWeights::from_raw(raw);
}

std::vector<NodeId> expand_node(Graph& graph, NodeId node_id, const GraphConfig& config, Rng& rng) {
  if (node_id >= graph.nodes.size()) throw ContractViolation("expand_node: unknown node " + std::to_string(node_id));
  if (!graph.nodes[node_id].active) {
    throw ContractViolation("expand_node: node " + std::to_string(node_id) + " is inactive");
  }
  const auto k = static_cast<std::uint32_t>(rng.uniform_int(config.children_min, config.children_max));
  std::vector<NodeId> children;
  if (k > 0) {
    const AngularWeights weights = angular_distribution(graph.nodes[node_id], parent_direction(graph, node_id), config);
    for (std::uint32_t c = 0; c < k; ++c) {
      const double step = rng.uniform(config.radius_min, config.radius_max);
      const int section = sample_section(weights, rng);
      const double theta = deg_to_rad(static_cast<double>(section));
      const Node& parent = graph.nodes[node_id];
      const Vec3 pos{parent.coordinates.x + step * std::cos(theta), parent.coordinates.y + step * std::sin(theta),
                     parent.coordinates.z};
      Node child = make_node(graph, pos, step, parent.layer);
      child.parent = node_id;
      child.active = !rng.bernoulli(config.branch_death_prob);
      graph.nodes.push_back(std::move(child));
      add_edge(graph, node_id, graph.nodes.back().id);
      children.push_back(graph.nodes.back().id);
    }
  }
  graph.nodes[node_id].active = false;
  return children;
}

double elevation_offset(double x, double y, const GraphConfig& config) {
  if (config.elevation_amplitude == 0.0) return 0.0;
  const NoiseParams params{.seed = derive_seed(config.seed, "elevation"),
                           .frequency = config.elevation_frequency,
                           .octaves = 2,
                           .lacunarity = 2.0,
                           .gain = 0.5};
  const double bound = elevation_bound(config);
  return std::clamp(config.elevation_amplitude * perlin3(Vec3{x, y, 0.0}, params), -bound, bound);
}

Graph apply_elevation(Graph graph, const GraphConfig& config) {
  if (config.elevation_amplitude == 0.0) return graph;
  for (Node& n : graph.nodes) {
    if (n.connector) continue;
    n.coordinates.z += elevation_offset(n.coordinates.x, n.coordinates.y, config);
  }
  return graph;
}

Graph connect_layers(Graph graph, const GraphConfig& config, Rng& rng) {
  if (config.layers < 2 || graph.layers < 2) {
    throw ContractViolation("connect_layers requires at least two layers");
  }
  const std::size_t original = graph.nodes.size();

  // Direct links created when a layer was rooted below its upper neighbour become passages.
  for (std::size_t i = 0; i < original; ++i) {
    const Node& n = graph.nodes[i];
    if (n.connector || !n.parent) continue;
    const Node& p = graph.nodes[*n.parent];
    if (p.connector || p.layer == n.layer) continue;
    const NodeId from = p.id;
    const NodeId to = n.id;
    remove_edge(graph, from, to);
    insert_passage(graph, from, to, {}, config, true);
  }

  const double max_slope = config.max_interconnect_angle_deg;
  for (std::uint32_t layer = 0; layer + 1 < graph.layers; ++layer) {
    const auto upper = growth_nodes_in_layer(graph, layer, original);
    const auto lower = growth_nodes_in_layer(graph, layer + 1, original);
    if (upper.empty() || lower.empty()) continue;
    for (std::uint32_t c = 0; c < config.interconnect_per_layer; ++c) {
      const NodeId a = upper[rng.below(upper.size())];
      const Vec3 pa = graph.nodes[a].coordinates;

      std::optional<NodeId> best;
      double best_dist = std::numeric_limits<double>::infinity();
      for (const NodeId b : lower) {
        const Vec3 pb = graph.nodes[b].coordinates;
        if (slope_deg(pa, pb) > max_slope) continue;
        const double d = distance(pa, pb);
        if (d < best_dist) {
          best_dist = d;
          best = b;
        }
      }
      const double side = rng.bernoulli(0.5) ? 1.0 : -1.0;
      const double fallback_angle = rng.uniform(0.0, 2.0 * kPi);
      if (best) {
        insert_passage(graph, a, *best, {}, config, false);
        continue;
      }

      // No node satisfies the bound: reach the horizontally nearest one through a bend whose
      // two legs climb at exactly the maximum slope.
      NodeId nearest = lower.front();
      double nearest_dist = std::numeric_limits<double>::infinity();
      for (const NodeId b : lower) {
        const double d = planar_distance(pa, graph.nodes[b].coordinates);
        if (d < nearest_dist) {
          nearest_dist = d;
          nearest = b;
        }
      }
      const Vec3 pb = graph.nodes[nearest].coordinates;
      const double rise = pa.z - pb.z;
      const double run_needed = rise / std::tan(deg_to_rad(max_slope));
      const double half_run = 0.5 * run_needed;
      const double half_gap = 0.5 * nearest_dist;
      const double offset = std::sqrt(std::max(0.0, half_run * half_run - half_gap * half_gap));
      Vec2 perp{std::cos(fallback_angle), std::sin(fallback_angle)};
      if (nearest_dist > 1e-9) {
        perp = {-(pb.y - pa.y) / nearest_dist, (pb.x - pa.x) / nearest_dist};
      }
      const Vec3 bend{0.5 * (pa.x + pb.x) + side * offset * perp.x, 0.5 * (pa.y + pb.y) + side * offset * perp.y,
                      pa.z - 0.5 * rise};
      insert_passage(graph, a, nearest, {bend}, config, false);
    }
  }
  return graph;
}

Graph generate_graph(const GraphConfig& config) {
  config.validate();
  Graph graph;
  graph.seed = config.seed;
  graph.layers = config.layers;

  Rng origin_rng = Rng::stream(config.seed, "origin");
  Node origin = make_node(graph, Vec3{0.0, 0.0, 0.0}, origin_rng.uniform(config.radius_min, config.radius_max), 0);
  graph.nodes.push_back(origin);

  const std::uint32_t per_layer =
      config.layers == 1 ? config.node_count_target
                         : (config.node_count_target + config.layers - 1) / config.layers;
  std::uint64_t expansions = 0;
  grow_layer(graph, config, 0, 0, per_layer, expansions);

  const double bound = elevation_bound(config);
  for (std::uint32_t layer = 1; layer < config.layers; ++layer) {
    // The new layer hangs below a random node of the layer above, far enough sideways that the
    // passage stays within the slope bound whatever the later elevation does.
    Rng rng = Rng::stream(config.seed, "descent", layer);
    const auto anchors = growth_nodes_in_layer(graph, layer - 1, graph.nodes.size());
    const NodeId anchor = anchors[rng.below(anchors.size())];
    const double angle = rng.uniform(0.5 * config.max_interconnect_angle_deg, config.max_interconnect_angle_deg);
    const double heading = rng.uniform(0.0, 2.0 * kPi);
    const double run = angle >= 90.0 - 1e-9
                           ? 0.0
                           : (config.layer_spacing + 2.0 * bound) / std::tan(deg_to_rad(angle));
    const Vec3 a = graph.nodes[anchor].coordinates;
    const Vec3 pos{a.x + run * std::cos(heading), a.y + run * std::sin(heading), layer_plane_z(layer, config)};
    Node root = make_node(graph, pos, rng.uniform(config.radius_min, config.radius_max), layer);
    root.parent = anchor;
    graph.nodes.push_back(root);
    add_edge(graph, anchor, root.id);
    grow_layer(graph, config, layer, root.id, per_layer, expansions);
  }

  graph = apply_elevation(std::move(graph), config);
  if (config.layers >= 2) {
    Rng rng = Rng::stream(config.seed, "interconnect");
    graph = connect_layers(std::move(graph), config, rng);
  }
  return graph;
}

}  // namespace plume
