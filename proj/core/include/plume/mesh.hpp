#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "plume/graph.hpp"
#include "plume/image.hpp"
#include "plume/vec.hpp"

namespace plume {

using Triangle = std::array<std::uint32_t, 3>;

/// Indexed triangle mesh.
struct TriMesh {
  std::vector<Vec3> positions;
  std::vector<Triangle> triangles;
  std::vector<Vec3> normals;               ///< per vertex; empty until computed
  std::vector<std::array<Vec2, 3>> uvs;    ///< per corner; empty when unparameterized
  bool closed = false;                     ///< claimed watertight 2-manifold

  [[nodiscard]] bool has_uvs() const { return !uvs.empty() && uvs.size() == triangles.size(); }
  [[nodiscard]] Aabb bounds() const;
  [[nodiscard]] double area() const;
  /// Signed enclosed volume (divergence theorem); positive when normals face outward.
  [[nodiscard]] double volume() const;
  [[nodiscard]] double triangle_area(std::size_t t) const;
  [[nodiscard]] Vec3 face_normal(std::size_t t) const;

  bool operator==(const TriMesh&) const = default;
};

/// Area-weighted vertex normals from face normals.
void compute_normals(TriMesh& mesh);

struct MeshConfig {
  double voxel_size = 0.5;
  double radius_scale = 0.35;
  int smooth_iterations = 10;
  double taubin_lambda = 0.5;
  double taubin_mu = -0.53;
  double decimate_ratio = 0.25;
  std::array<int, 3> chunk_grid{1, 1, 1};
  std::uint64_t cell_budget = 512ull * 512ull * 512ull;

  void validate(std::string_view where = "mesh") const;
  bool operator==(const MeshConfig&) const = default;
};

/// Signed distance to the union of tapered capsules around the graph edges (negative inside
/// the tunnel). Nodes without edges contribute a sphere.
double sdf_eval(const Graph& graph, double radius_scale, const Vec3& p);

/// Marching-cubes polygonization of the zero level set of sdf_eval. The result is closed and
/// consistently wound with normals pointing into the rock.
TriMesh skin_graph(const Graph& graph, const MeshConfig& config);

/// Taubin lambda|mu smoothing with a uniform Laplacian. Connectivity is unchanged.
TriMesh smooth_mesh(const TriMesh& mesh, const MeshConfig& config);

struct DecimationResult {
  TriMesh mesh;
  std::size_t input_triangles = 0;
  std::size_t target_triangles = 0;
  double achieved_ratio = 1.0;
  bool reached_target = true;
};

/// Quadric-error edge collapse down to decimate_ratio of the input triangle count. Collapses
/// that would break manifoldness, flip a face or create a degenerate face are skipped; when no
/// legal collapse remains the result reports the ratio it reached.
DecimationResult decimate(const TriMesh& mesh, const MeshConfig& config);

struct Chunk {
  std::array<int, 3> index{0, 0, 0};
  TriMesh mesh;
  Aabb bounds;
  std::optional<TextureSet> textures;
};

/// Chunk grid actually used: the z division collapses to 1 for single-layer caves.
std::array<int, 3> effective_chunk_grid(const MeshConfig& config, std::uint32_t layers);

/// Splits the mesh over an nx*ny*nz grid of its bounding box, clipping triangles exactly at
/// cell planes. Empty cells are dropped. Chunks are ordered by (i, j, k) with i fastest.
std::vector<Chunk> chunk_mesh(const TriMesh& mesh, const MeshConfig& config, std::uint32_t layers);

struct MeshReport {
  std::size_t vertex_count = 0;
  std::size_t referenced_vertices = 0;
  std::size_t triangle_count = 0;
  std::size_t edge_count = 0;
  std::size_t boundary_edges = 0;        ///< used by exactly one triangle
  std::size_t nonmanifold_edges = 0;     ///< used by more than two triangles
  std::size_t misoriented_edges = 0;     ///< two uses with the same direction
  std::size_t nonmanifold_vertices = 0;  ///< incident faces do not form a single fan
  std::size_t degenerate_triangles = 0;
  std::size_t invalid_indices = 0;
  std::size_t components = 0;
  long long euler_characteristic = 0;  ///< V - E + F over referenced vertices
  Aabb bounds;

  [[nodiscard]] bool closed() const {
    return invalid_indices == 0 && boundary_edges == 0 && nonmanifold_edges == 0 && misoriented_edges == 0 &&
           nonmanifold_vertices == 0;
  }
  [[nodiscard]] bool valid() const { return invalid_indices == 0 && degenerate_triangles == 0; }
};

MeshReport validate_mesh(const TriMesh& mesh);

}  // namespace plume
