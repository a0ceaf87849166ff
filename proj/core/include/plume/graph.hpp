#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plume/angular.hpp"
#include "plume/rng.hpp"
#include "plume/vec.hpp"

namespace plume {

using NodeId = std::uint32_t;

/// One vertex of the cave skeleton.
struct Node {
  NodeId id = 0;
  std::optional<NodeId> parent;  ///< empty only for the origin
  std::vector<NodeId> edges;     ///< sorted, symmetric, no self-loops
  Vec3 coordinates;              ///< metres
  double radius = 0.0;           ///< child step length and tunnel girth
  bool active = false;           ///< may still spawn children
  std::uint32_t layer = 0;
  /// Intermediate node of an inter-layer passage (not produced by growth).
  bool connector = false;

  bool operator==(const Node&) const = default;
};

struct Graph {
  std::vector<Node> nodes;  ///< nodes[i].id == i
  std::uint32_t layers = 1;
  std::uint64_t seed = 0;

  bool operator==(const Graph&) const = default;
};

enum class DistributionKind { kGaussian, kPerlin, kHybrid };

std::string_view to_string(DistributionKind kind);
DistributionKind distribution_kind_from_string(std::string_view name);

struct DistributionConfig {
  DistributionKind kind = DistributionKind::kHybrid;
  double sigma_deg = 45.0;         ///< gaussian spread around the continuation direction
  double perlin_frequency = 3.0;   ///< cycles per revolution
  double blend = 0.35;             ///< hybrid weight of the perlin component

  bool operator==(const DistributionConfig&) const = default;
};

struct GraphConfig {
  std::uint32_t node_count_target = 50;
  double radius_min = 4.0;
  double radius_max = 12.0;
  std::uint32_t children_min = 1;
  std::uint32_t children_max = 3;
  double branch_death_prob = 0.15;
  double forbidden_half_angle_deg = 60.0;
  DistributionConfig distribution;
  std::uint32_t layers = 1;
  double layer_spacing = 15.0;
  double max_interconnect_angle_deg = 60.0;
  std::uint32_t interconnect_per_layer = 2;
  double elevation_amplitude = 1.5;
  double elevation_frequency = 0.03;
  std::uint64_t seed = 0;

  /// Throws ConfigError naming the offending key(s), prefixed by `where`.
  void validate(std::string_view where = "graph") const;
  bool operator==(const GraphConfig&) const = default;
};

/// Builds the full skeleton: planar layer growth, local elevation and, for several layers,
/// slope-bounded inter-layer passages.
Graph generate_graph(const GraphConfig& config);

/// Spawns children of an active node on circles around it and deactivates it.
std::vector<NodeId> expand_node(Graph& graph, NodeId node_id, const GraphConfig& config, Rng& rng);

/// Unit xy direction from `node` towards its parent, if the parent is horizontally apart.
std::optional<Vec2> parent_direction(const Graph& graph, NodeId node_id);

/// Spawn distribution around `node` with the sector facing `parent_direction` zeroed.
AngularWeights angular_distribution(const Node& node, const std::optional<Vec2>& parent_direction,
                                    const GraphConfig& config);

/// Vertical displacement applied by `apply_elevation` at planar location (x, y).
double elevation_offset(double x, double y, const GraphConfig& config);

/// Adds gradient-noise relief to z of every growth node.
Graph apply_elevation(Graph graph, const GraphConfig& config);

/// Subdivides direct inter-layer links into passages and adds `interconnect_per_layer`
/// further passages between each pair of adjacent layers.
Graph connect_layers(Graph graph, const GraphConfig& config, Rng& rng);

/// Slope of segment a-b above the horizontal, in degrees (90 for a vertical segment).
double slope_deg(const Vec3& a, const Vec3& b);

/// Adds a symmetric edge; no-op when it exists. Throws ContractViolation on a self-loop.
void add_edge(Graph& graph, NodeId a, NodeId b);
void remove_edge(Graph& graph, NodeId a, NodeId b);

/// Number of connected components over edges.
std::size_t component_count(const Graph& graph);

/// Nominal z of a layer plane (layers stack downwards).
double layer_plane_z(std::uint32_t layer, const GraphConfig& config);

}  // namespace plume
