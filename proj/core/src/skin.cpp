#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "marching_cubes_tables.hpp"
#include "plume/error.hpp"
#include "plume/mesh.hpp"
#include "plume/parallel.hpp"

namespace plume {

namespace {

struct Capsule {
  Vec3 a;
  Vec3 b;
  double ra;
  double rb;
};

inline double capsule_sdf(const Capsule& c, const Vec3& p) {
  const Vec3 ab = c.b - c.a;
  const double len2 = dot(ab, ab);
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(dot(p - c.a, ab) / len2, 0.0, 1.0);
  return distance(p, c.a + ab * t) - lerp(c.ra, c.rb, t);
}

std::vector<Capsule> graph_capsules(const Graph& graph, double radius_scale) {
  std::vector<Capsule> out;
  for (const Node& n : graph.nodes) {
    bool has_edge = false;
    for (const NodeId e : n.edges) {
      if (e >= graph.nodes.size()) continue;
      has_edge = true;
      if (e < n.id) continue;
      const Node& m = graph.nodes[e];
      out.push_back({n.coordinates, m.coordinates, n.radius * radius_scale, m.radius * radius_scale});
    }
    if (!has_edge) {
      out.push_back({n.coordinates, n.coordinates, n.radius * radius_scale, n.radius * radius_scale});
    }
  }
  return out;
}

// Interpolation parameters are kept off the grid corners so that distinct edge crossings never
// coincide and no triangle collapses to zero area.
constexpr double kEdgeClamp = 0.01;

}  // namespace

double sdf_eval(const Graph& graph, double radius_scale, const Vec3& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const Capsule& c : graph_capsules(graph, radius_scale)) best = std::min(best, capsule_sdf(c, p));
  return best;
}

TriMesh skin_graph(const Graph& graph, const MeshConfig& config) {
  if (graph.nodes.empty()) throw ContractViolation("skin_graph: graph has no nodes");
  config.validate();

  const std::vector<Capsule> capsules = graph_capsules(graph, config.radius_scale);
  const double voxel = config.voxel_size;
  double max_radius = 0.0;
  Aabb nodes_box;
  for (const Node& n : graph.nodes) {
    nodes_box.expand(n.coordinates);
    max_radius = std::max(max_radius, n.radius * config.radius_scale);
  }
  const Aabb box = nodes_box.inflated(max_radius + 2.0 * voxel);
  const Vec3 ext = box.extent();
  const auto points_along = [&](double e) { return static_cast<std::int64_t>(std::ceil(e / voxel)) + 1; };
  const std::int64_t nx = points_along(ext.x);
  const std::int64_t ny = points_along(ext.y);
  const std::int64_t nz = points_along(ext.z);
  const auto cells = static_cast<long double>(nx - 1) * static_cast<long double>(ny - 1) * static_cast<long double>(nz - 1);
  if (cells > static_cast<long double>(config.cell_budget)) {
    throw ResourceLimitError("skin_graph: sampling grid of " + std::to_string(nx - 1) + "x" + std::to_string(ny - 1) +
                             "x" + std::to_string(nz - 1) + " cells exceeds the cell budget of " +
                             std::to_string(config.cell_budget) + " (mesh.cell_budget)");
  }

  const Vec3 origin = box.lo;
  const auto index = [nx, ny](std::int64_t i, std::int64_t j, std::int64_t k) {
    return static_cast<std::size_t>((k * ny + j) * nx + i);
  };
  const auto point = [&](std::int64_t i, std::int64_t j, std::int64_t k) {
    return Vec3{origin.x + voxel * static_cast<double>(i), origin.y + voxel * static_cast<double>(j),
                origin.z + voxel * static_cast<double>(k)};
  };

  // Exact distances are needed only near the surface; farther samples keep the band value,
  // whose sign (outside) is correct because every capsule lies inside its own inflated box.
  const double band = 3.0 * voxel;
  std::vector<float> field(static_cast<std::size_t>(nx * ny * nz), static_cast<float>(band));
  struct Range {
    std::int64_t lo[3];
    std::int64_t hi[3];
  };
  std::vector<Range> ranges(capsules.size());
  for (std::size_t c = 0; c < capsules.size(); ++c) {
    const Capsule& cap = capsules[c];
    const double reach = std::max(cap.ra, cap.rb) + band;
    const Vec3 lo = min(cap.a, cap.b) - Vec3{reach, reach, reach} - origin;
    const Vec3 hi = max(cap.a, cap.b) + Vec3{reach, reach, reach} - origin;
    const std::int64_t n[3] = {nx, ny, nz};
    for (int a = 0; a < 3; ++a) {
      ranges[c].lo[a] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(lo[a] / voxel)), 0, n[a] - 1);
      ranges[c].hi[a] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::ceil(hi[a] / voxel)), 0, n[a] - 1);
    }
  }
  parallel_for(static_cast<std::size_t>(nz), [&](std::size_t slab) {
    const auto k = static_cast<std::int64_t>(slab);
    for (std::size_t c = 0; c < capsules.size(); ++c) {
      const Range& r = ranges[c];
      if (k < r.lo[2] || k > r.hi[2]) continue;
      for (std::int64_t j = r.lo[1]; j <= r.hi[1]; ++j) {
        for (std::int64_t i = r.lo[0]; i <= r.hi[0]; ++i) {
          float& v = field[index(i, j, k)];
          v = std::min(v, static_cast<float>(capsule_sdf(capsules[c], point(i, j, k))));
        }
      }
    }
    for (std::int64_t j = 0; j < ny; ++j) {
      for (std::int64_t i = 0; i < nx; ++i) {
        float& v = field[index(i, j, k)];
        if (v == 0.0f) v = std::numeric_limits<float>::min();
      }
    }
  });

  // Pass 1: one vertex per sign-changing grid edge, numbered in canonical (k, j, i, axis) order.
  const std::int64_t step[3] = {1, nx, nx * ny};
  struct SlabVertices {
    std::vector<std::uint64_t> keys;
    std::vector<Vec3> positions;
  };
  std::vector<SlabVertices> slabs(static_cast<std::size_t>(nz));
  parallel_for(static_cast<std::size_t>(nz), [&](std::size_t slab) {
    const auto k = static_cast<std::int64_t>(slab);
    SlabVertices& out = slabs[slab];
    for (std::int64_t j = 0; j < ny; ++j) {
      for (std::int64_t i = 0; i < nx; ++i) {
        const std::size_t base = index(i, j, k);
        const float v0 = field[base];
        const std::int64_t c[3] = {i, j, k};
        const std::int64_t n[3] = {nx, ny, nz};
        for (int axis = 0; axis < 3; ++axis) {
          if (c[axis] + 1 >= n[axis]) continue;
          const float v1 = field[base + static_cast<std::size_t>(step[axis])];
          if ((v0 < 0.0f) == (v1 < 0.0f)) continue;
          const double t = std::clamp(static_cast<double>(v0) / (static_cast<double>(v0) - static_cast<double>(v1)),
                                      kEdgeClamp, 1.0 - kEdgeClamp);
          Vec3 p = point(i, j, k);
          p[axis] += voxel * t;
          out.keys.push_back(static_cast<std::uint64_t>(base) * 3 + static_cast<std::uint64_t>(axis));
          out.positions.push_back(p);
        }
      }
    }
  });

  TriMesh mesh;
  std::unordered_map<std::uint64_t, std::uint32_t> vertex_of_edge;
  std::size_t total = 0;
  for (const auto& s : slabs) total += s.keys.size();
  vertex_of_edge.reserve(total);
  mesh.positions.reserve(total);
  for (auto& s : slabs) {
    for (std::size_t v = 0; v < s.keys.size(); ++v) {
      vertex_of_edge.emplace(s.keys[v], static_cast<std::uint32_t>(mesh.positions.size()));
      mesh.positions.push_back(s.positions[v]);
    }
    s = {};
  }

  // Pass 2: triangles per cell, concatenated in slab order.
  std::vector<std::vector<Triangle>> slab_tris(static_cast<std::size_t>(nz > 0 ? nz - 1 : 0));
  parallel_for(slab_tris.size(), [&](std::size_t slab) {
    const auto k = static_cast<std::int64_t>(slab);
    auto& out = slab_tris[slab];
    for (std::int64_t j = 0; j + 1 < ny; ++j) {
      for (std::int64_t i = 0; i + 1 < nx; ++i) {
        int cube = 0;
        for (int c = 0; c < 8; ++c) {
          const auto& off = detail::kCorner[static_cast<std::size_t>(c)];
          if (field[index(i + off[0], j + off[1], k + off[2])] < 0.0f) cube |= 1 << c;
        }
        if (cube == 0 || cube == 255) continue;
        std::uint32_t edge_vertex[12];
        for (int e = 0; e < 12; ++e) {
          const auto& ends = detail::kEdge[static_cast<std::size_t>(e)];
          const auto& a = detail::kCorner[static_cast<std::size_t>(ends[0])];
          const auto& b = detail::kCorner[static_cast<std::size_t>(ends[1])];
          const bool ina = (cube >> ends[0]) & 1;
          const bool inb = (cube >> ends[1]) & 1;
          if (ina == inb) continue;
          int axis = 0;
          while (a[static_cast<std::size_t>(axis)] == b[static_cast<std::size_t>(axis)]) ++axis;
          const std::int64_t li = i + std::min(a[0], b[0]);
          const std::int64_t lj = j + std::min(a[1], b[1]);
          const std::int64_t lk = k + std::min(a[2], b[2]);
          const std::uint64_t key = static_cast<std::uint64_t>(index(li, lj, lk)) * 3 + static_cast<std::uint64_t>(axis);
          edge_vertex[e] = vertex_of_edge.at(key);
        }
        const int* row = detail::kTriTable[cube];
        for (int t = 0; row[t] != -1; t += 3) {
          // The table winds faces towards the inside corners; reversing makes normals point
          // from the tunnel into the rock.
          out.push_back({edge_vertex[row[t]], edge_vertex[row[t + 2]], edge_vertex[row[t + 1]]});
        }
      }
    }
  });
  for (auto& s : slab_tris) {
    mesh.triangles.insert(mesh.triangles.end(), s.begin(), s.end());
    s.clear();
    s.shrink_to_fit();
  }

  compute_normals(mesh);
  mesh.closed = true;
  return mesh;
}

}  // namespace plume
