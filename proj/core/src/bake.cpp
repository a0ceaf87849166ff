#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "plume/error.hpp"
#include "plume/parallel.hpp"
#include "plume/texture.hpp"

namespace plume {

namespace {

constexpr std::uint32_t kUncovered = std::numeric_limits<std::uint32_t>::max();

struct PixelTriangle {
  Vec2 p[3];
  double area2;  // twice the signed area in texel units
};

inline double edge_fn(const Vec2& a, const Vec2& b, double x, double y) {
  return (b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x);
}

PixelTriangle to_pixels(const std::array<Vec2, 3>& uv, int resolution) {
  PixelTriangle t{};
  for (int c = 0; c < 3; ++c) {
    t.p[c] = {uv[static_cast<std::size_t>(c)].x * resolution, (1.0 - uv[static_cast<std::size_t>(c)].y) * resolution};
  }
  t.area2 = edge_fn(t.p[0], t.p[1], t.p[2].x, t.p[2].y);
  return t;
}

// Barycentric weights of (x, y), clamped onto the triangle.
std::array<double, 3> barycentric(const PixelTriangle& t, double x, double y) {
  std::array<double, 3> w{edge_fn(t.p[1], t.p[2], x, y) / t.area2, edge_fn(t.p[2], t.p[0], x, y) / t.area2,
                          edge_fn(t.p[0], t.p[1], x, y) / t.area2};
  double sum = 0.0;
  for (double& v : w) {
    v = std::max(v, 0.0);
    sum += v;
  }
  if (sum <= 0.0) return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  for (double& v : w) v /= sum;
  return w;
}

}  // namespace

TextureSet bake_chunk(const TriMesh& mesh, const UvAtlas& atlas, const MaterialParams& params, int resolution) {
  if (!is_supported_resolution(resolution)) {
    throw ConfigError("texture_resolution (" + std::to_string(resolution) +
                      ") must be a power of two in [256, 8192]");
  }
  if (atlas.resolution != resolution || atlas.uvs.size() != mesh.triangles.size()) {
    throw ContractViolation("bake_chunk: atlas was not built for this chunk at resolution " +
                            std::to_string(resolution));
  }
  params.validate();

  const int res = resolution;
  const std::size_t texels = static_cast<std::size_t>(res) * res;
  std::vector<std::uint32_t> owner(texels, kUncovered);

  for (std::uint32_t t = 0; t < mesh.triangles.size(); ++t) {
    const PixelTriangle pt = to_pixels(atlas.uvs[t], res);
    if (pt.area2 == 0.0) continue;
    const double minx = std::min({pt.p[0].x, pt.p[1].x, pt.p[2].x});
    const double maxx = std::max({pt.p[0].x, pt.p[1].x, pt.p[2].x});
    const double miny = std::min({pt.p[0].y, pt.p[1].y, pt.p[2].y});
    const double maxy = std::max({pt.p[0].y, pt.p[1].y, pt.p[2].y});
    const int x0 = std::max(0, static_cast<int>(std::ceil(minx - 0.5)));
    const int x1 = std::min(res - 1, static_cast<int>(std::floor(maxx - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(miny - 0.5)));
    const int y1 = std::min(res - 1, static_cast<int>(std::floor(maxy - 0.5)));
    const double sign = pt.area2 > 0.0 ? 1.0 : -1.0;
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double cx = x + 0.5;
        const double cy = y + 0.5;
        if (sign * edge_fn(pt.p[1], pt.p[2], cx, cy) < 0.0 || sign * edge_fn(pt.p[2], pt.p[0], cx, cy) < 0.0 ||
            sign * edge_fn(pt.p[0], pt.p[1], cx, cy) < 0.0) {
          continue;
        }
        std::uint32_t& o = owner[static_cast<std::size_t>(y) * res + x];
        if (o == kUncovered) o = t;
      }
    }
  }

  TextureSet out;
  out.resolution = res;
  out.color = Image(res, res, 3);
  out.normal = Image(res, res, 3);
  out.roughness = Image(res, res, 1);
  std::vector<float> height(texels, 0.0f);

  parallel_for(static_cast<std::size_t>(res), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < res; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * res + x;
      const std::uint32_t t = owner[i];
      if (t == kUncovered) continue;
      const PixelTriangle pt = to_pixels(atlas.uvs[t], res);
      const auto w = barycentric(pt, x + 0.5, y + 0.5);
      const Triangle& tri = mesh.triangles[t];
      const Vec3 p = mesh.positions[tri[0]] * w[0] + mesh.positions[tri[1]] * w[1] + mesh.positions[tri[2]] * w[2];
      const MaterialSample s = material_eval(p, mesh.face_normal(t), params);
      std::uint8_t* c = out.color.at(x, y);
      c[0] = encode_srgb(s.albedo.r);
      c[1] = encode_srgb(s.albedo.g);
      c[2] = encode_srgb(s.albedo.b);
      out.roughness.at(x, y)[0] = static_cast<std::uint8_t>(std::floor(s.roughness * 255.0 + 0.5));
      height[i] = static_cast<float>(s.height);
    }
  });

  // Tangent-space normals from height differences between neighbouring texels of one island.
  const double density = atlas.texels_per_unit;
  parallel_for(static_cast<std::size_t>(res), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < res; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * res + x;
      if (owner[i] == kUncovered) continue;
      const std::uint32_t island = atlas.island_of_triangle[owner[i]];
      const auto usable = [&](int xx, int yy) {
        if (xx < 0 || yy < 0 || xx >= res || yy >= res) return false;
        const std::uint32_t o = owner[static_cast<std::size_t>(yy) * res + xx];
        return o != kUncovered && atlas.island_of_triangle[o] == island;
      };
      const auto h = [&](int xx, int yy) { return static_cast<double>(height[static_cast<std::size_t>(yy) * res + xx]); };
      const auto slope = [&](int dx, int dy) {
        const bool fwd = usable(x + dx, y + dy);
        const bool back = usable(x - dx, y - dy);
        if (fwd && back) return (h(x + dx, y + dy) - h(x - dx, y - dy)) * 0.5;
        if (fwd) return h(x + dx, y + dy) - h(x, y);
        if (back) return h(x, y) - h(x - dx, y - dy);
        return 0.0;
      };
      const double dh_du = slope(1, 0) * density;
      const double dh_dv = -slope(0, 1) * density;  // image rows run against v
      const Vec3 n = normalized(Vec3{-dh_du, -dh_dv, 1.0});
      const auto e = encode_normal(n);
      std::copy(e.begin(), e.end(), out.normal.at(x, y));
    }
  });

  // Gutter fill: breadth-first from every covered texel, copying the source texel.
  std::vector<std::uint32_t> queue;
  queue.reserve(texels);
  std::vector<bool> filled(texels, false);
  for (std::size_t i = 0; i < texels; ++i) {
    if (owner[i] != kUncovered) {
      filled[i] = true;
      queue.push_back(static_cast<std::uint32_t>(i));
    }
  }
  if (queue.empty()) {
    // Nothing landed on a texel centre; fall back to one flat sample of the first face.
    const Triangle& tri = mesh.triangles.front();
    const Vec3 p = (mesh.positions[tri[0]] + mesh.positions[tri[1]] + mesh.positions[tri[2]]) / 3.0;
    const MaterialSample s = material_eval(p, mesh.face_normal(0), params);
    const std::uint8_t rough = static_cast<std::uint8_t>(std::floor(s.roughness * 255.0 + 0.5));
    for (int y = 0; y < res; ++y) {
      for (int x = 0; x < res; ++x) {
        std::uint8_t* c = out.color.at(x, y);
        c[0] = encode_srgb(s.albedo.r);
        c[1] = encode_srgb(s.albedo.g);
        c[2] = encode_srgb(s.albedo.b);
        std::uint8_t* n = out.normal.at(x, y);
        n[0] = 128;
        n[1] = 128;
        n[2] = 255;
        out.roughness.at(x, y)[0] = rough;
      }
    }
    return out;
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::uint32_t i = queue[head];
    const int x = static_cast<int>(i % static_cast<std::uint32_t>(res));
    const int y = static_cast<int>(i / static_cast<std::uint32_t>(res));
    const int nx[4] = {x - 1, x + 1, x, x};
    const int ny[4] = {y, y, y - 1, y + 1};
    for (int k = 0; k < 4; ++k) {
      if (nx[k] < 0 || ny[k] < 0 || nx[k] >= res || ny[k] >= res) continue;
      const std::size_t j = static_cast<std::size_t>(ny[k]) * res + nx[k];
      if (filled[j]) continue;
      filled[j] = true;
      std::copy_n(out.color.at(x, y), 3, out.color.at(nx[k], ny[k]));
      std::copy_n(out.normal.at(x, y), 3, out.normal.at(nx[k], ny[k]));
      out.roughness.at(nx[k], ny[k])[0] = out.roughness.at(x, y)[0];
      queue.push_back(static_cast<std::uint32_t>(j));
    }
  }
  return out;
}

}  // namespace plume
