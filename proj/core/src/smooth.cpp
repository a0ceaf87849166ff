#include <algorithm>

#include "plume/error.hpp"
#include "plume/mesh.hpp"
#include "plume/parallel.hpp"

namespace plume {

namespace {

// Compressed vertex adjacency (one-ring neighbours, sorted, unique).
struct Adjacency {
  std::vector<std::size_t> offsets;
  std::vector<std::uint32_t> neighbours;
};

Adjacency build_adjacency(const TriMesh& mesh) {
  std::vector<std::vector<std::uint32_t>> rings(mesh.positions.size());
  for (const Triangle& t : mesh.triangles) {
    for (int c = 0; c < 3; ++c) {
      rings[t[c]].push_back(t[(c + 1) % 3]);
      rings[t[c]].push_back(t[(c + 2) % 3]);
    }
  }
  Adjacency adj;
  adj.offsets.reserve(rings.size() + 1);
  adj.offsets.push_back(0);
  for (auto& r : rings) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    adj.neighbours.insert(adj.neighbours.end(), r.begin(), r.end());
    adj.offsets.push_back(adj.neighbours.size());
  }
  return adj;
}

void laplacian_step(const Adjacency& adj, const std::vector<Vec3>& in, std::vector<Vec3>& out, double factor) {
  parallel_for(in.size(), [&](std::size_t v) {
    const std::size_t begin = adj.offsets[v];
    const std::size_t end = adj.offsets[v + 1];
    if (begin == end) {
      out[v] = in[v];
      return;
    }
    Vec3 centroid;
    for (std::size_t k = begin; k < end; ++k) centroid += in[adj.neighbours[k]];
    centroid = centroid / static_cast<double>(end - begin);
    out[v] = in[v] + (centroid - in[v]) * factor;
  });
}

}  // namespace

TriMesh smooth_mesh(const TriMesh& mesh, const MeshConfig& config) {
  config.validate();
  if (!mesh.closed) throw ContractViolation("smooth_mesh: input mesh is not flagged closed");
  if (config.smooth_iterations == 0) return mesh;

  const Adjacency adj = build_adjacency(mesh);
  std::vector<Vec3> a = mesh.positions;
  std::vector<Vec3> b(a.size());
  for (int it = 0; it < config.smooth_iterations; ++it) {
    laplacian_step(adj, a, b, config.taubin_lambda);
    laplacian_step(adj, b, a, config.taubin_mu);
  }

  TriMesh out = mesh;
  out.positions = std::move(a);
  compute_normals(out);
  return out;
}

}  // namespace plume
