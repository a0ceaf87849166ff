#include <cmath>
#include <sstream>

#include "plume/error.hpp"
#include "plume/mesh.hpp"

namespace plume {

Aabb TriMesh::bounds() const {
  Aabb box;
  for (const Vec3& p : positions) box.expand(p);
  return box;
}

Vec3 TriMesh::face_normal(std::size_t t) const {
  const Triangle& tri = triangles[t];
  return cross(positions[tri[1]] - positions[tri[0]], positions[tri[2]] - positions[tri[0]]);
}

double TriMesh::triangle_area(std::size_t t) const { return 0.5 * length(face_normal(t)); }

double TriMesh::area() const {
  double total = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) total += triangle_area(t);
  return total;
}

double TriMesh::volume() const {
  double total = 0.0;
  for (const Triangle& tri : triangles) {
    total += dot(positions[tri[0]], cross(positions[tri[1]], positions[tri[2]]));
  }
  return total / 6.0;
}

void compute_normals(TriMesh& mesh) {
  std::vector<Vec3> accum(mesh.positions.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Vec3 n = mesh.face_normal(t);  // length is twice the area
    for (const std::uint32_t v : mesh.triangles[t]) accum[v] += n;
  }
  mesh.normals.resize(mesh.positions.size());
  for (std::size_t v = 0; v < accum.size(); ++v) mesh.normals[v] = normalized(accum[v]);
}

void MeshConfig::validate(std::string_view where) const {
  const std::string p = std::string(where) + ".";
  auto fail = [&](const std::string& what, double value) {
    std::ostringstream os;
    os.precision(17);
    os << p << what << " (got " << value << ")";
    throw ConfigError(os.str());
  };
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) fail("voxel_size must be > 0", voxel_size);
  if (!(radius_scale > 0.0) || !std::isfinite(radius_scale)) fail("radius_scale must be > 0", radius_scale);
  if (smooth_iterations < 0) fail("smooth_iterations must be >= 0", smooth_iterations);
  if (!(taubin_lambda > 0.0 && taubin_lambda < 1.0)) fail("taubin_lambda must be in (0, 1)", taubin_lambda);
  if (!(taubin_mu > -1.0 && taubin_mu < 0.0)) fail("taubin_mu must be in (-1, 0)", taubin_mu);
  if (!(-taubin_mu > taubin_lambda)) {
    fail("taubin_mu magnitude must exceed taubin_lambda (" + std::to_string(taubin_lambda) + ")", taubin_mu);
  }
  if (!(decimate_ratio > 0.0 && decimate_ratio <= 1.0)) fail("decimate_ratio must be in (0, 1]", decimate_ratio);
  for (int a = 0; a < 3; ++a) {
    if (chunk_grid[static_cast<std::size_t>(a)] < 1) {
      fail("chunk_grid[" + std::to_string(a) + "] must be >= 1", chunk_grid[static_cast<std::size_t>(a)]);
    }
  }
  if (cell_budget < 1) fail("cell_budget must be >= 1", static_cast<double>(cell_budget));
}

}  // namespace plume
