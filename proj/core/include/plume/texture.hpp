#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "plume/image.hpp"
#include "plume/mesh.hpp"
#include "plume/noise.hpp"
#include "plume/vec.hpp"

namespace plume {

/// Linear RGB in [0, 1].
struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
  bool operator==(const Rgb&) const = default;
};

struct MaterialParams {
  Rgb base_color_a{0.42, 0.37, 0.31};
  Rgb base_color_b{0.20, 0.17, 0.14};
  NoiseParams color_noise{0, 0.35, 4, 2.0, 0.5};
  NoiseParams vein_noise{0, 0.22, 1, 2.0, 0.5};  ///< cellular; only seed and frequency matter
  double vein_strength = 0.35;
  double height_amplitude = 0.03;  ///< world units
  NoiseParams height_noise{0, 1.5, 3, 2.0, 0.5};
  double roughness_base = 0.7;
  double roughness_variation = 0.2;
  double humidity = 0.2;  ///< 1 is soaking wet; each unit lowers roughness by 0.5

  void validate(std::string_view where = "material") const;
  bool operator==(const MaterialParams&) const = default;
};

struct MaterialSample {
  Rgb albedo;
  double height = 0.0;
  double roughness = 0.0;             ///< clamped to [0, 1]
  double roughness_unclamped = 0.0;
  bool operator==(const MaterialSample&) const = default;
};

/// Procedural rock material at world position `p`. The result depends on `p` only, never on
/// the mesh or chunk being shaded, so neighbouring chunks agree on shared boundaries.
MaterialSample material_eval(const Vec3& p, const Vec3& n, const MaterialParams& params);

/// Texture side lengths accepted by the baker: powers of two in [256, 8192].
bool is_supported_resolution(int resolution);
inline constexpr int kMinTextureResolution = 256;
inline constexpr int kMaxTextureResolution = 8192;

/// Empty space kept around every packed island, in texels.
inline constexpr int kAtlasGutter = 2;

/// An edge-connected group of triangles sharing one axis chart, packed as a rectangle.
struct AtlasIsland {
  int chart = 0;             ///< 0..5 for +X, -X, +Y, -Y, +Z, -Z
  Vec2 proj_min;             ///< lower corner of the projected extent, world units
  Vec2 proj_max;
  int x = 0;                 ///< packed rectangle in texels, gutter included, y downwards
  int y = 0;
  int width = 0;
  int height = 0;
  std::vector<std::uint32_t> triangles;
};

struct UvAtlas {
  int resolution = 0;
  double texels_per_unit = 0.0;  ///< uniform world-to-texel density shared by every chart
  int halvings = 0;              ///< how often packing overflowed and density was halved
  std::vector<std::uint8_t> chart_of_triangle;
  std::vector<std::uint32_t> island_of_triangle;
  std::vector<AtlasIsland> islands;
  std::vector<std::array<Vec2, 3>> uvs;  ///< per corner, v upwards
};

/// Chart index (0..5) of the dominant component of `normal`.
int dominant_chart(const Vec3& normal);
/// In-chart planar coordinates of `p`; orientation is chosen so that the chart's (u, v, axis)
/// frame is right-handed.
Vec2 chart_project(int chart, const Vec3& p);

/// Axis-chart parameterization with shelf packing. Throws ContractViolation on an empty mesh
/// and ConfigError on an unsupported resolution.
UvAtlas build_uv_atlas(const TriMesh& mesh, int resolution);

/// Rasterizes the atlas, evaluates the material per covered texel and fills gutters by
/// nearest-texel dilation.
TextureSet bake_chunk(const TriMesh& mesh, const UvAtlas& atlas, const MaterialParams& params, int resolution);

/// Tangent-space normal encoding: component c maps to floor((c + 1) / 2 * 255 + 0.5).
std::array<std::uint8_t, 3> encode_normal(const Vec3& n);
Vec3 decode_normal(const std::uint8_t* rgb);
std::uint8_t encode_srgb(double linear);

}  // namespace plume
