#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>

#include "plume/error.hpp"
#include "plume/mesh.hpp"

namespace plume {

namespace {

struct ClipVertex {
  Vec3 p;
  Vec3 n;
};

bool lex_less(const Vec3& a, const Vec3& b) {
  if (a.x != b.x) return a.x < b.x;
  if (a.y != b.y) return a.y < b.y;
  return a.z < b.z;
}

// Intersection of segment ab with the plane {axis = value}. The endpoints are ordered first so
// that neighbouring cells clipping the same edge compute the same bits.
ClipVertex intersect(ClipVertex a, ClipVertex b, int axis, double value) {
  if (lex_less(b.p, a.p)) std::swap(a, b);
  const double t = (value - a.p[axis]) / (b.p[axis] - a.p[axis]);
  ClipVertex r{lerp(a.p, b.p, t), lerp(a.n, b.n, t)};
  r.p[axis] = value;
  return r;
}

// Keeps the part of the polygon with sign * (x[axis] - value) <= 0.
std::vector<ClipVertex> clip(const std::vector<ClipVertex>& poly, int axis, double value, double sign) {
  std::vector<ClipVertex> out;
  if (poly.empty()) return out;
  const auto inside = [&](const ClipVertex& v) { return sign * (v.p[axis] - value) <= 0.0; };
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const ClipVertex& cur = poly[i];
    const ClipVertex& next = poly[(i + 1) % poly.size()];
    const bool in_cur = inside(cur);
    const bool in_next = inside(next);
    if (in_cur) out.push_back(cur);
    if (in_cur != in_next) out.push_back(intersect(cur, next, axis, value));
  }
  return out;
}

struct PositionKey {
  std::uint64_t bits[3];
  bool operator<(const PositionKey& o) const {
    return std::lexicographical_compare(bits, bits + 3, o.bits, o.bits + 3);
  }
};

PositionKey key_of(const Vec3& p) {
  PositionKey k{};
  const double c[3] = {p.x + 0.0, p.y + 0.0, p.z + 0.0};  // folds -0 into +0
  for (int a = 0; a < 3; ++a) std::memcpy(&k.bits[a], &c[a], sizeof(double));
  return k;
}

}  // namespace

std::array<int, 3> effective_chunk_grid(const MeshConfig& config, std::uint32_t layers) {
  std::array<int, 3> g = config.chunk_grid;
  g[2] = layers <= 1 ? 1 : std::min<int>(g[2], static_cast<int>(layers));
  return g;
}

std::vector<Chunk> chunk_mesh(const TriMesh& mesh, const MeshConfig& config, std::uint32_t layers) {
  config.validate();
  std::vector<Chunk> chunks;
  if (mesh.triangles.empty()) return chunks;
  const std::array<int, 3> grid = effective_chunk_grid(config, layers);
  const Aabb box = mesh.bounds();

  if (grid[0] == 1 && grid[1] == 1 && grid[2] == 1) {
    Chunk c;
    c.mesh = mesh;
    c.bounds = box;
    chunks.push_back(std::move(c));
    return chunks;
  }

  // Plane i of axis a sits at lo + i * extent / n; the last plane is the box face itself.
  std::array<std::vector<double>, 3> planes;
  for (int a = 0; a < 3; ++a) {
    const int n = grid[static_cast<std::size_t>(a)];
    auto& pl = planes[static_cast<std::size_t>(a)];
    for (int i = 0; i <= n; ++i) {
      pl.push_back(i == n ? box.hi[a] : box.lo[a] + (box.hi[a] - box.lo[a]) * static_cast<double>(i) / n);
    }
  }
  const auto cell_of = [&](int axis, double x) {
    const auto& pl = planes[static_cast<std::size_t>(axis)];
    const int n = grid[static_cast<std::size_t>(axis)];
    int i = static_cast<int>(std::upper_bound(pl.begin(), pl.end(), x) - pl.begin()) - 1;
    return std::clamp(i, 0, n - 1);
  };

  const double diag = length(box.extent());
  const double min_area = 1e-14 * diag * diag;
  const bool with_normals = mesh.normals.size() == mesh.positions.size();

  struct Builder {
    TriMesh mesh;
    std::map<PositionKey, std::uint32_t> index;
    std::vector<Vec3> normal_sum;
  };
  const std::size_t cell_count = static_cast<std::size_t>(grid[0]) * grid[1] * grid[2];
  std::vector<Builder> builders(cell_count);

  const auto add_vertex = [&](Builder& b, const ClipVertex& v) {
    const auto [it, fresh] = b.index.emplace(key_of(v.p), static_cast<std::uint32_t>(b.mesh.positions.size()));
    if (fresh) {
      b.mesh.positions.push_back(v.p);
      b.normal_sum.push_back(v.n);
    }
    return it->second;
  };

  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    std::vector<ClipVertex> poly(3);
    Aabb tb;
    for (int c = 0; c < 3; ++c) {
      poly[static_cast<std::size_t>(c)].p = mesh.positions[tri[c]];
      poly[static_cast<std::size_t>(c)].n = with_normals ? mesh.normals[tri[c]] : Vec3{};
      tb.expand(mesh.positions[tri[c]]);
    }
    int lo[3], hi[3];
    for (int a = 0; a < 3; ++a) {
      lo[a] = cell_of(a, tb.lo[a]);
      hi[a] = cell_of(a, tb.hi[a]);
      // A vertex exactly on a plane belongs to both neighbours; include the lower cell too.
      if (lo[a] > 0 && tb.lo[a] == planes[static_cast<std::size_t>(a)][static_cast<std::size_t>(lo[a])]) --lo[a];
    }
    for (int k = lo[2]; k <= hi[2]; ++k) {
      for (int j = lo[1]; j <= hi[1]; ++j) {
        for (int i = lo[0]; i <= hi[0]; ++i) {
          const int cell[3] = {i, j, k};
          std::vector<ClipVertex> piece = poly;
          for (int a = 0; a < 3 && !piece.empty(); ++a) {
            const auto& pl = planes[static_cast<std::size_t>(a)];
            const int c = cell[a];
            if (c > 0) piece = clip(piece, a, pl[static_cast<std::size_t>(c)], -1.0);
            if (c + 1 < grid[static_cast<std::size_t>(a)]) piece = clip(piece, a, pl[static_cast<std::size_t>(c + 1)], 1.0);
          }
          if (piece.size() < 3) continue;
          Builder& b = builders[(static_cast<std::size_t>(k) * grid[1] + j) * grid[0] + i];
          for (std::size_t f = 1; f + 1 < piece.size(); ++f) {
            const Vec3 n = cross(piece[f].p - piece[0].p, piece[f + 1].p - piece[0].p);
            if (0.5 * length(n) <= min_area) continue;
            const std::uint32_t a0 = add_vertex(b, piece[0]);
            const std::uint32_t a1 = add_vertex(b, piece[f]);
            const std::uint32_t a2 = add_vertex(b, piece[f + 1]);
            if (a0 == a1 || a1 == a2 || a0 == a2) continue;
            b.mesh.triangles.push_back({a0, a1, a2});
          }
        }
      }
    }
  }

  for (int k = 0; k < grid[2]; ++k) {
    for (int j = 0; j < grid[1]; ++j) {
      for (int i = 0; i < grid[0]; ++i) {
        Builder& b = builders[(static_cast<std::size_t>(k) * grid[1] + j) * grid[0] + i];
        if (b.mesh.triangles.empty()) continue;
        Chunk c;
        c.index = {i, j, k};
        c.bounds.lo = {planes[0][static_cast<std::size_t>(i)], planes[1][static_cast<std::size_t>(j)],
                       planes[2][static_cast<std::size_t>(k)]};
        c.bounds.hi = {planes[0][static_cast<std::size_t>(i + 1)], planes[1][static_cast<std::size_t>(j + 1)],
                       planes[2][static_cast<std::size_t>(k + 1)]};
        c.mesh = std::move(b.mesh);
        if (with_normals) {
          c.mesh.normals.resize(c.mesh.positions.size());
          for (std::size_t v = 0; v < c.mesh.positions.size(); ++v) c.mesh.normals[v] = normalized(b.normal_sum[v]);
        } else {
          compute_normals(c.mesh);
        }
        chunks.push_back(std::move(c));
      }
    }
  }
  return chunks;
}

}  // namespace plume
