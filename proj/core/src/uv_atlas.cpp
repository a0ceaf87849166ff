#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

#include "plume/error.hpp"
#include "plume/texture.hpp"

namespace plume {

namespace {

struct UnionFind {
  std::vector<std::uint32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }
};

constexpr int kMaxHalvings = 40;

// Shelf packing of island rectangles, tallest first. Returns false on overflow.
bool pack(std::vector<AtlasIsland>& islands, int resolution) {
  std::vector<std::size_t> order(islands.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (islands[a].height != islands[b].height) return islands[a].height > islands[b].height;
    if (islands[a].width != islands[b].width) return islands[a].width > islands[b].width;
    return a < b;
  });
  int x = 0;
  int y = 0;
  int shelf = 0;
  for (const std::size_t i : order) {
    AtlasIsland& is = islands[i];
    if (is.width > resolution) return false;
    if (x + is.width > resolution) {
      y += shelf;
      x = 0;
      shelf = 0;
    }
    if (y + is.height > resolution) return false;
    is.x = x;
    is.y = y;
    x += is.width;
    shelf = std::max(shelf, is.height);
  }
  return true;
}

}  // namespace

int dominant_chart(const Vec3& n) {
  const double ax = std::abs(n.x);
  const double ay = std::abs(n.y);
  const double az = std::abs(n.z);
  int axis = 2;
  if (ax >= ay && ax >= az && ax > 0.0) {
    axis = 0;
  } else if (ay >= az && ay > 0.0) {
    axis = 1;
  }
  return 2 * axis + (n[axis] < 0.0 ? 1 : 0);
}

Vec2 chart_project(int chart, const Vec3& p) {
  const int axis = chart / 2;
  const bool negative = (chart % 2) == 1;
  const double u = p[(axis + 1) % 3];
  const double v = p[(axis + 2) % 3];
  return {negative ? -u : u, v};
}

UvAtlas build_uv_atlas(const TriMesh& mesh, int resolution) {
  if (mesh.triangles.empty()) throw ContractViolation("build_uv_atlas: chunk mesh is empty");
  if (!is_supported_resolution(resolution)) {
    throw ConfigError("texture_resolution (" + std::to_string(resolution) +
                      ") must be a power of two in [256, 8192]");
  }
  const std::size_t nt = mesh.triangles.size();
  UvAtlas atlas;
  atlas.resolution = resolution;
  atlas.chart_of_triangle.resize(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    atlas.chart_of_triangle[t] = static_cast<std::uint8_t>(dominant_chart(mesh.face_normal(t)));
  }

  // Islands: triangles of one chart joined across shared edges.
  UnionFind uf(nt);
  std::unordered_map<std::uint64_t, std::uint32_t> edge_owner;
  edge_owner.reserve(nt * 2);
  for (std::uint32_t t = 0; t < nt; ++t) {
    const Triangle& tri = mesh.triangles[t];
    for (int c = 0; c < 3; ++c) {
      const std::uint32_t a = std::min(tri[c], tri[(c + 1) % 3]);
      const std::uint32_t b = std::max(tri[c], tri[(c + 1) % 3]);
      const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
      const auto [it, fresh] = edge_owner.emplace(key, t);
      if (!fresh && atlas.chart_of_triangle[it->second] == atlas.chart_of_triangle[t]) uf.unite(it->second, t);
    }
  }
  std::unordered_map<std::uint32_t, std::uint32_t> island_of_root;
  atlas.island_of_triangle.resize(nt);
  for (std::uint32_t t = 0; t < nt; ++t) {
    const std::uint32_t root = uf.find(t);
    const auto [it, fresh] = island_of_root.emplace(root, static_cast<std::uint32_t>(atlas.islands.size()));
    if (fresh) {
      AtlasIsland is;
      is.chart = atlas.chart_of_triangle[t];
      is.proj_min = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
      is.proj_max = {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
      atlas.islands.push_back(std::move(is));
    }
    AtlasIsland& is = atlas.islands[it->second];
    is.triangles.push_back(t);
    atlas.island_of_triangle[t] = it->second;
    for (const std::uint32_t v : mesh.triangles[t]) {
      const Vec2 q = chart_project(is.chart, mesh.positions[v]);
      is.proj_min = {std::min(is.proj_min.x, q.x), std::min(is.proj_min.y, q.y)};
      is.proj_max = {std::max(is.proj_max.x, q.x), std::max(is.proj_max.y, q.y)};
    }
  }

  // Initial density fills roughly 70% of the square with island extents, limited so that the
  // largest island fits on its own.
  double extent_area = 0.0;
  double largest = 0.0;
  for (const AtlasIsland& is : atlas.islands) {
    const Vec2 e = is.proj_max - is.proj_min;
    extent_area += std::max(e.x, 1e-9) * std::max(e.y, 1e-9);
    largest = std::max({largest, e.x, e.y});
  }
  const double usable = resolution - 2 * kAtlasGutter - 1;
  double density = std::sqrt(0.7 * static_cast<double>(resolution) * resolution / extent_area);
  if (largest > 0.0) density = std::min(density, usable / largest);

  for (atlas.halvings = 0;; ++atlas.halvings) {
    if (atlas.halvings > kMaxHalvings) {
      throw ResourceLimitError("build_uv_atlas: " + std::to_string(atlas.islands.size()) +
                               " islands do not fit a " + std::to_string(resolution) + "^2 atlas");
    }
    for (AtlasIsland& is : atlas.islands) {
      const Vec2 e = is.proj_max - is.proj_min;
      is.width = static_cast<int>(std::ceil(e.x * density)) + 1 + 2 * kAtlasGutter;
      is.height = static_cast<int>(std::ceil(e.y * density)) + 1 + 2 * kAtlasGutter;
    }
    if (pack(atlas.islands, resolution)) break;
    density *= 0.5;
  }
  atlas.texels_per_unit = density;

  const double inv = 1.0 / resolution;
  atlas.uvs.resize(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const AtlasIsland& is = atlas.islands[atlas.island_of_triangle[t]];
    for (int c = 0; c < 3; ++c) {
      const Vec2 q = chart_project(is.chart, mesh.positions[mesh.triangles[t][c]]);
      const double px = is.x + kAtlasGutter + 0.5 + (q.x - is.proj_min.x) * density;
      const double py = is.y + kAtlasGutter + 0.5 + (is.proj_max.y - q.y) * density;
      atlas.uvs[t][static_cast<std::size_t>(c)] = {px * inv, 1.0 - py * inv};
    }
  }
  return atlas;
}

}  // namespace plume
