#pragma once

#include <cstdint>
#include <string_view>

#include "plume/vec.hpp"

namespace plume {

/// Hyperparameters shared by the gradient and cellular noise functions.
struct NoiseParams {
  std::uint64_t seed = 0;
  double frequency = 1.0;  ///< cycles per world unit
  int octaves = 1;
  double lacunarity = 2.0;  ///< frequency ratio between octaves
  double gain = 0.5;        ///< amplitude ratio between octaves

  /// Throws ConfigError naming `where` if a field is out of range.
  void validate(std::string_view where = "noise") const;
  bool operator==(const NoiseParams&) const = default;
};

/// Fractal gradient noise with quintic fade and seed-hashed unit gradients.
/// The result lies in [-1, 1] and vanishes on the integer lattice of the base octave.
double perlin3(const Vec3& p, const NoiseParams& params);

/// Analytic gradient of `perlin3` with respect to `p`.
Vec3 perlin3_gradient(const Vec3& p, const NoiseParams& params);

struct VoronoiSample {
  double f1 = 0.0;             ///< world-space distance to the nearest feature point
  std::uint64_t cell_id = 0;  ///< identifier of the lattice cell owning that feature
  bool operator==(const VoronoiSample&) const = default;
};

/// Cellular (F1) noise with one jittered feature point per unit cell of the scaled domain.
/// Only `seed` and `frequency` are used.
VoronoiSample voronoi3(const Vec3& p, const NoiseParams& params);

/// Feature point of scaled-domain cell (cx, cy, cz), returned in world coordinates.
Vec3 voronoi_feature_point(std::int64_t cx, std::int64_t cy, std::int64_t cz, const NoiseParams& params);

/// Identifier reported by `voronoi3` for cell (cx, cy, cz).
std::uint64_t voronoi_cell_id(std::int64_t cx, std::int64_t cy, std::int64_t cz, std::uint64_t seed);

/// Feature points are jittered inside [kJitterLo, kJitterLo + kJitterSpan) of each cell. With
/// this margin the nearest feature always lies in the 3x3x3 neighbourhood of the query cell.
inline constexpr double kVoronoiJitterLo = 0.3;
inline constexpr double kVoronoiJitterSpan = 0.4;

}  // namespace plume
