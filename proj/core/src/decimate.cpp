#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>

#include "plume/error.hpp"
#include "plume/mesh.hpp"

namespace plume {

namespace {

// Symmetric 4x4 quadric stored as its upper triangle.
struct Quadric {
  std::array<double, 10> q{};

  static Quadric plane(const Vec3& n, double d, double weight) {
    Quadric r;
    const double a = n.x, b = n.y, c = n.z;
    r.q = {a * a, a * b, a * c, a * d, b * b, b * c, b * d, c * c, c * d, d * d};
    for (double& v : r.q) v *= weight;
    return r;
  }
  Quadric& operator+=(const Quadric& o) {
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += o.q[i];
    return *this;
  }
  [[nodiscard]] double error(const Vec3& p) const {
    const double x = p.x, y = p.y, z = p.z;
    return q[0] * x * x + 2 * q[1] * x * y + 2 * q[2] * x * z + 2 * q[3] * x + q[4] * y * y + 2 * q[5] * y * z +
           2 * q[6] * y + q[7] * z * z + 2 * q[8] * z + q[9];
  }
  // Minimizer of the quadric, when the 3x3 block is well conditioned.
  [[nodiscard]] bool minimizer(Vec3& out, double scale) const {
    const double a = q[0], b = q[1], c = q[2], d = q[4], e = q[5], f = q[7];
    const double det = a * (d * f - e * e) - b * (b * f - c * e) + c * (b * e - c * d);
    const double norm = std::max({std::abs(a), std::abs(d), std::abs(f), 1e-300});
    if (std::abs(det) <= 1e-9 * norm * norm * norm) return false;
    const double rx = -q[3], ry = -q[6], rz = -q[8];
    out.x = (rx * (d * f - e * e) - b * (ry * f - rz * e) + c * (ry * e - rz * d)) / det;
    out.y = (a * (ry * f - rz * e) - rx * (b * f - c * e) + c * (b * rz - c * ry)) / det;
    out.z = (a * (d * rz - e * ry) - b * (b * rz - c * ry) + rx * (b * e - c * d)) / det;
    return std::isfinite(out.x) && std::isfinite(out.y) && std::isfinite(out.z) && scale > 0.0;
  }
};

struct Candidate {
  double cost;
  std::uint32_t u;
  std::uint32_t v;
  std::uint32_t stamp_u;
  std::uint32_t stamp_v;
  Vec3 target;

  // Lowest cost first, ties broken by vertex ids so the order is total.
  bool operator<(const Candidate& o) const {
    if (cost != o.cost) return cost > o.cost;
    if (u != o.u) return u > o.u;
    return v > o.v;
  }
};

class Decimator {
 public:
  Decimator(const TriMesh& mesh, double voxel) : pos_(mesh.positions), tris_(mesh.triangles) {
    const std::size_t nv = pos_.size();
    faces_of_.resize(nv);
    quadric_.resize(nv);
    stamp_.assign(nv, 0);
    vertex_alive_.assign(nv, true);
    face_alive_.assign(tris_.size(), true);
    alive_faces_ = tris_.size();
    min_area_ = 1e-8 * voxel * voxel;
    for (std::uint32_t f = 0; f < tris_.size(); ++f) {
      const Triangle& t = tris_[f];
      const Vec3 n = cross(pos_[t[1]] - pos_[t[0]], pos_[t[2]] - pos_[t[0]]);
      const double len = length(n);
      for (const std::uint32_t v : t) faces_of_[v].push_back(f);
      if (len <= 0.0) continue;
      const Vec3 unit = n / len;
      const Quadric qf = Quadric::plane(unit, -dot(unit, pos_[t[0]]), 0.5 * len);
      for (const std::uint32_t v : t) quadric_[v] += qf;
    }
  }

  std::size_t alive_faces() const { return alive_faces_; }

  // One sweep over a fresh queue of every edge. Returns the number of collapses performed.
  std::size_t sweep(std::size_t target) {
    std::priority_queue<Candidate> heap;
    for (std::uint32_t f = 0; f < tris_.size(); ++f) {
      if (!face_alive_[f]) continue;
      const Triangle& t = tris_[f];
      for (int c = 0; c < 3; ++c) {
        const std::uint32_t a = t[c];
        const std::uint32_t b = t[(c + 1) % 3];
        if (a < b) heap.push(candidate(a, b));
      }
    }
    std::size_t collapses = 0;
    while (alive_faces_ > target && alive_faces_ > 4 && !heap.empty()) {
      const Candidate c = heap.top();
      heap.pop();
      if (!vertex_alive_[c.u] || !vertex_alive_[c.v]) continue;
      if (stamp_[c.u] != c.stamp_u || stamp_[c.v] != c.stamp_v) continue;
      if (!try_collapse(c.u, c.v, c.target)) continue;
      ++collapses;
      for (const std::uint32_t w : ring(c.u)) heap.push(candidate(std::min(c.u, w), std::max(c.u, w)));
    }
    return collapses;
  }

  TriMesh result() const {
    TriMesh out;
    std::vector<std::uint32_t> remap(pos_.size(), UINT32_MAX);
    for (std::uint32_t f = 0; f < tris_.size(); ++f) {
      if (!face_alive_[f]) continue;
      for (const std::uint32_t v : tris_[f]) remap[v] = 0;
    }
    for (std::uint32_t v = 0; v < pos_.size(); ++v) {
      if (remap[v] == UINT32_MAX) continue;
      remap[v] = static_cast<std::uint32_t>(out.positions.size());
      out.positions.push_back(pos_[v]);
    }
    for (std::uint32_t f = 0; f < tris_.size(); ++f) {
      if (!face_alive_[f]) continue;
      const Triangle& t = tris_[f];
      out.triangles.push_back({remap[t[0]], remap[t[1]], remap[t[2]]});
    }
    return out;
  }

 private:
  std::vector<std::uint32_t> ring(std::uint32_t v) const {
    std::vector<std::uint32_t> r;
    for (const std::uint32_t f : faces_of_[v]) {
      for (const std::uint32_t w : tris_[f]) {
        if (w != v) r.push_back(w);
      }
    }
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    return r;
  }

  Candidate candidate(std::uint32_t u, std::uint32_t v) const {
    Quadric q = quadric_[u];
    q += quadric_[v];
    const Vec3 mid = (pos_[u] + pos_[v]) * 0.5;
    const double edge = distance(pos_[u], pos_[v]);
    Vec3 best = mid;
    double best_cost = q.error(mid);
    Vec3 opt;
    // The free minimizer is only trusted near the edge; far-away optima come from nearly
    // coplanar neighbourhoods where the quadric is flat anyway.
    if (q.minimizer(opt, edge) && distance(opt, mid) <= edge) {
      const double e = q.error(opt);
      if (e <= best_cost) {
        best = opt;
        best_cost = e;
      }
    }
    for (const Vec3& p : {pos_[u], pos_[v]}) {
      const double e = q.error(p);
      if (e < best_cost) {
        best = p;
        best_cost = e;
      }
    }
    return {std::max(best_cost, 0.0), u, v, stamp_[u], stamp_[v], best};
  }

  bool try_collapse(std::uint32_t u, std::uint32_t v, const Vec3& target) {
    // Link condition: on a closed manifold the edge is shared by exactly two faces, and the
    // one-rings of its endpoints may only meet at those faces' apexes.
    std::vector<std::uint32_t> shared;
    for (const std::uint32_t f : faces_of_[u]) {
      const Triangle& t = tris_[f];
      if (t[0] == v || t[1] == v || t[2] == v) shared.push_back(f);
    }
    if (shared.size() != 2) return false;
    const std::vector<std::uint32_t> ru = ring(u);
    const std::vector<std::uint32_t> rv = ring(v);
    std::vector<std::uint32_t> common;
    std::set_intersection(ru.begin(), ru.end(), rv.begin(), rv.end(), std::back_inserter(common));
    if (common.size() != 2) return false;

    // Geometry check on every surviving face that moves.
    for (const std::uint32_t endpoint : {u, v}) {
      for (const std::uint32_t f : faces_of_[endpoint]) {
        if (f == shared[0] || f == shared[1]) continue;
        const Triangle& t = tris_[f];
        std::array<Vec3, 3> before{pos_[t[0]], pos_[t[1]], pos_[t[2]]};
        std::array<Vec3, 3> after = before;
        for (int c = 0; c < 3; ++c) {
          if (t[c] == u || t[c] == v) after[c] = target;
        }
        const Vec3 n0 = cross(before[1] - before[0], before[2] - before[0]);
        const Vec3 n1 = cross(after[1] - after[0], after[2] - after[0]);
        const double a1 = 0.5 * length(n1);
        if (a1 < min_area_) return false;
        const double l0 = length(n0);
        if (l0 > 0.0 && dot(n0, n1) < 0.1 * l0 * 2.0 * a1) return false;
      }
    }

    for (const std::uint32_t f : shared) {
      face_alive_[f] = false;
      --alive_faces_;
    }
    std::vector<std::uint32_t> merged;
    for (const std::uint32_t f : faces_of_[u]) {
      if (face_alive_[f]) merged.push_back(f);
    }
    for (const std::uint32_t f : faces_of_[v]) {
      if (!face_alive_[f]) continue;
      for (std::uint32_t& w : tris_[f]) {
        if (w == v) w = u;
      }
      merged.push_back(f);
    }
    std::sort(merged.begin(), merged.end());
    for (const std::uint32_t f : shared) {
      const Triangle& t = tris_[f];
      for (const std::uint32_t w : t) {
        if (w == u || w == v) continue;
        auto& list = faces_of_[w];
        list.erase(std::remove(list.begin(), list.end(), f), list.end());
      }
    }
    faces_of_[u] = std::move(merged);
    faces_of_[v].clear();
    vertex_alive_[v] = false;
    pos_[u] = target;
    quadric_[u] += quadric_[v];
    ++stamp_[u];
    return true;
  }

  std::vector<Vec3> pos_;
  std::vector<Triangle> tris_;
  std::vector<std::vector<std::uint32_t>> faces_of_;
  std::vector<Quadric> quadric_;
  std::vector<std::uint32_t> stamp_;
  std::vector<bool> vertex_alive_;
  std::vector<bool> face_alive_;
  std::size_t alive_faces_ = 0;
  double min_area_ = 0.0;
};

}  // namespace

DecimationResult decimate(const TriMesh& mesh, const MeshConfig& config) {
  config.validate();
  const MeshReport report = validate_mesh(mesh);
  if (!report.closed()) {
    throw ContractViolation("decimate: input mesh is not a closed 2-manifold (" +
                            std::to_string(report.boundary_edges) + " boundary, " +
                            std::to_string(report.nonmanifold_edges) + " non-manifold edges, " +
                            std::to_string(report.nonmanifold_vertices) + " non-manifold vertices)");
  }

  DecimationResult result;
  result.input_triangles = mesh.triangles.size();
  if (config.decimate_ratio >= 1.0 || mesh.triangles.empty()) {
    result.mesh = mesh;
    result.target_triangles = mesh.triangles.size();
    return result;
  }
  result.target_triangles =
      static_cast<std::size_t>(std::floor(config.decimate_ratio * static_cast<double>(mesh.triangles.size())));

  Decimator d(mesh, config.voxel_size);
  while (d.alive_faces() > result.target_triangles) {
    if (d.sweep(result.target_triangles) == 0) break;
  }
  result.mesh = d.result();
  result.mesh.closed = true;
  compute_normals(result.mesh);
  result.achieved_ratio =
      static_cast<double>(result.mesh.triangles.size()) / static_cast<double>(result.input_triangles);
  result.reached_target = result.mesh.triangles.size() <= result.target_triangles;
  return result;
}

}  // namespace plume
