#include <algorithm>
#include <numeric>

#include "plume/mesh.hpp"

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
  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

}  // namespace

MeshReport validate_mesh(const TriMesh& mesh) {
  MeshReport report;
  report.vertex_count = mesh.positions.size();
  report.triangle_count = mesh.triangles.size();
  const auto nv = static_cast<std::uint32_t>(mesh.positions.size());

  std::vector<std::size_t> good;
  good.reserve(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    if (tri[0] >= nv || tri[1] >= nv || tri[2] >= nv) {
      ++report.invalid_indices;
      continue;
    }
    good.push_back(t);
  }

  std::vector<char> referenced(nv, 0);
  for (const std::size_t t : good) {
    for (const std::uint32_t v : mesh.triangles[t]) {
      referenced[v] = 1;
      report.bounds.expand(mesh.positions[v]);
    }
  }
  report.referenced_vertices = static_cast<std::size_t>(std::count(referenced.begin(), referenced.end(), 1));

  const Vec3 diag = report.bounds.empty() ? Vec3{} : report.bounds.extent();
  const double area_floor = 1e-14 * std::max(1e-300, dot(diag, diag));
  for (const std::size_t t : good) {
    const Triangle& tri = mesh.triangles[t];
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] || mesh.triangle_area(t) <= area_floor) {
      ++report.degenerate_triangles;
    }
  }

  // Undirected edges keyed (lo, hi) with the traversal direction of each use.
  struct HalfEdge {
    std::uint32_t lo, hi;
    bool forward;
  };
  std::vector<HalfEdge> half;
  half.reserve(good.size() * 3);
  for (const std::size_t t : good) {
    const Triangle& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      const std::uint32_t a = tri[static_cast<std::size_t>(k)];
      const std::uint32_t b = tri[static_cast<std::size_t>((k + 1) % 3)];
      half.push_back({std::min(a, b), std::max(a, b), a < b});
    }
  }
  std::sort(half.begin(), half.end(), [](const HalfEdge& x, const HalfEdge& y) {
    return x.lo != y.lo ? x.lo < y.lo : (x.hi != y.hi ? x.hi < y.hi : x.forward < y.forward);
  });
  for (std::size_t i = 0; i < half.size();) {
    std::size_t j = i;
    while (j < half.size() && half[j].lo == half[i].lo && half[j].hi == half[i].hi) ++j;
    const std::size_t uses = j - i;
    ++report.edge_count;
    if (uses == 1) {
      ++report.boundary_edges;
    } else if (uses > 2) {
      ++report.nonmanifold_edges;
    } else if (half[i].forward == half[i + 1].forward) {
      ++report.misoriented_edges;
    }
    i = j;
  }

  // Vertex fans: incident faces must be connected through edges at that vertex.
  std::vector<std::uint32_t> offsets(nv + 1, 0);
  for (const std::size_t t : good) {
    for (const std::uint32_t v : mesh.triangles[t]) ++offsets[v + 1];
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<std::uint32_t> incident(offsets.back());
  std::vector<std::uint32_t> fill(offsets.begin(), offsets.end() - 1);
  for (const std::size_t t : good) {
    for (const std::uint32_t v : mesh.triangles[t]) incident[fill[v]++] = static_cast<std::uint32_t>(t);
  }
  for (std::uint32_t v = 0; v < nv; ++v) {
    const std::uint32_t begin = offsets[v];
    const std::uint32_t end = offsets[v + 1];
    if (end - begin < 2) continue;
    UnionFind fan(end - begin);
    std::size_t groups = end - begin;
    for (std::uint32_t i = begin; i < end; ++i) {
      for (std::uint32_t j = i + 1; j < end; ++j) {
        const Triangle& a = mesh.triangles[incident[i]];
        const Triangle& b = mesh.triangles[incident[j]];
        bool share = false;
        for (const std::uint32_t x : a) {
          if (x == v) continue;
          for (const std::uint32_t y : b) share = share || (x == y);
        }
        if (share && fan.unite(i - begin, j - begin)) --groups;
      }
    }
    if (groups > 1) ++report.nonmanifold_vertices;
  }

  UnionFind components(nv);
  for (const std::size_t t : good) {
    const Triangle& tri = mesh.triangles[t];
    components.unite(tri[0], tri[1]);
    components.unite(tri[1], tri[2]);
  }
  for (std::uint32_t v = 0; v < nv; ++v) {
    if (referenced[v] && components.find(v) == v) ++report.components;
  }

  report.euler_characteristic = static_cast<long long>(report.referenced_vertices) -
                                static_cast<long long>(report.edge_count) + static_cast<long long>(good.size());
  return report;
}

}  // namespace plume
