#include "plume/noise.hpp"

#include <array>
#include <limits>
#include <string>

#include "plume/error.hpp"
#include "plume/rng.hpp"

namespace plume {

namespace {

// Supremum of single-octave noise built from unit edge gradients. Found by maximising the
// per-corner best-case gradient response over the unit cell; dividing by it keeps |n| <= 1.
constexpr double kPerlinBound = 0.7329;

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr std::array<Vec3, 12> kGradients = {{
    {kInvSqrt2, kInvSqrt2, 0},  {-kInvSqrt2, kInvSqrt2, 0},  {kInvSqrt2, -kInvSqrt2, 0},
    {-kInvSqrt2, -kInvSqrt2, 0}, {kInvSqrt2, 0, kInvSqrt2},  {-kInvSqrt2, 0, kInvSqrt2},
    {kInvSqrt2, 0, -kInvSqrt2}, {-kInvSqrt2, 0, -kInvSqrt2}, {0, kInvSqrt2, kInvSqrt2},
    {0, -kInvSqrt2, kInvSqrt2},  {0, kInvSqrt2, -kInvSqrt2},  {0, -kInvSqrt2, -kInvSqrt2},
}};

inline std::uint64_t lattice_hash(std::int64_t x, std::int64_t y, std::int64_t z, std::uint64_t seed) {
  std::uint64_t h = mix64(seed ^ 0x243f6a8885a308d3ull);
  h = mix64(h ^ static_cast<std::uint64_t>(x) * 0x9e3779b97f4a7c15ull);
  h = mix64(h ^ static_cast<std::uint64_t>(y) * 0xc2b2ae3d27d4eb4full);
  h = mix64(h ^ static_cast<std::uint64_t>(z) * 0x165667b19e3779f9ull);
  return h;
}

inline double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }
inline double fade_derivative(double t) { return 30.0 * t * t * (t * (t - 2.0) + 1.0); }

inline std::uint64_t octave_seed(std::uint64_t seed, int octave) {
  return octave == 0 ? seed : hash_combine(seed, static_cast<std::uint64_t>(octave));
}

struct OctaveResult {
  double value;
  Vec3 gradient;
};

template <bool kWithGradient>
OctaveResult gradient_noise(const Vec3& q, std::uint64_t seed) {
  const double fx = std::floor(q.x);
  const double fy = std::floor(q.y);
  const double fz = std::floor(q.z);
  const auto ix = static_cast<std::int64_t>(fx);
  const auto iy = static_cast<std::int64_t>(fy);
  const auto iz = static_cast<std::int64_t>(fz);
  const Vec3 t{q.x - fx, q.y - fy, q.z - fz};
  const Vec3 s{fade(t.x), fade(t.y), fade(t.z)};
  Vec3 ds{};
  if constexpr (kWithGradient) ds = {fade_derivative(t.x), fade_derivative(t.y), fade_derivative(t.z)};

  double value = 0.0;
  Vec3 grad{};
  for (int corner = 0; corner < 8; ++corner) {
    const int cx = corner & 1;
    const int cy = (corner >> 1) & 1;
    const int cz = (corner >> 2) & 1;
    const Vec3& g = kGradients[lattice_hash(ix + cx, iy + cy, iz + cz, seed) % kGradients.size()];
    const Vec3 d{t.x - cx, t.y - cy, t.z - cz};
    const double response = dot(g, d);
    const double wx = cx ? s.x : 1.0 - s.x;
    const double wy = cy ? s.y : 1.0 - s.y;
    const double wz = cz ? s.z : 1.0 - s.z;
    const double w = wx * wy * wz;
    value += w * response;
    if constexpr (kWithGradient) {
      const double dwx = cx ? ds.x : -ds.x;
      const double dwy = cy ? ds.y : -ds.y;
      const double dwz = cz ? ds.z : -ds.z;
      grad += Vec3{dwx * wy * wz, wx * dwy * wz, wx * wy * dwz} * response + g * w;
    }
  }
  return {value / kPerlinBound, grad / kPerlinBound};
}

template <bool kWithGradient>
OctaveResult fractal(const Vec3& p, const NoiseParams& params) {
  params.validate("perlin3");
  double frequency = params.frequency;
  double amplitude = 1.0;
  double amplitude_sum = 0.0;
  double value = 0.0;
  Vec3 grad{};
  for (int o = 0; o < params.octaves; ++o) {
    const OctaveResult r = gradient_noise<kWithGradient>(p * frequency, octave_seed(params.seed, o));
    value += amplitude * r.value;
    if constexpr (kWithGradient) grad += r.gradient * (amplitude * frequency);
    amplitude_sum += amplitude;
    amplitude *= params.gain;
    frequency *= params.lacunarity;
  }
  return {value / amplitude_sum, grad / amplitude_sum};
}

}  // namespace

void NoiseParams::validate(std::string_view where) const {
  const std::string prefix(where);
  if (!(frequency > 0.0) || !std::isfinite(frequency)) {
    throw ConfigError(prefix + ".frequency must be > 0 (got " + std::to_string(frequency) + ")");
  }
  if (octaves < 1) throw ConfigError(prefix + ".octaves must be >= 1 (got " + std::to_string(octaves) + ")");
  if (!(lacunarity > 1.0)) {
    throw ConfigError(prefix + ".lacunarity must be > 1 (got " + std::to_string(lacunarity) + ")");
  }
  if (!(gain > 0.0 && gain < 1.0)) {
    throw ConfigError(prefix + ".gain must be in (0, 1) (got " + std::to_string(gain) + ")");
  }
}

double perlin3(const Vec3& p, const NoiseParams& params) { return fractal<false>(p, params).value; }

Vec3 perlin3_gradient(const Vec3& p, const NoiseParams& params) { return fractal<true>(p, params).gradient; }

std::uint64_t voronoi_cell_id(std::int64_t cx, std::int64_t cy, std::int64_t cz, std::uint64_t seed) {
  return lattice_hash(cx, cy, cz, seed ^ 0x5851f42d4c957f2dull);
}

namespace {

inline Vec3 feature_in_scaled_domain(std::int64_t cx, std::int64_t cy, std::int64_t cz, std::uint64_t seed) {
  const std::uint64_t h = lattice_hash(cx, cy, cz, seed);
  constexpr double kUnit = 1.0 / 2097152.0;  // 21 bits per axis
  const double jx = static_cast<double>(h & 0x1fffff) * kUnit;
  const double jy = static_cast<double>((h >> 21) & 0x1fffff) * kUnit;
  const double jz = static_cast<double>((h >> 42) & 0x1fffff) * kUnit;
  return {static_cast<double>(cx) + kVoronoiJitterLo + kVoronoiJitterSpan * jx,
          static_cast<double>(cy) + kVoronoiJitterLo + kVoronoiJitterSpan * jy,
          static_cast<double>(cz) + kVoronoiJitterLo + kVoronoiJitterSpan * jz};
}

}  // namespace

Vec3 voronoi_feature_point(std::int64_t cx, std::int64_t cy, std::int64_t cz, const NoiseParams& params) {
  params.validate("voronoi3");
  return feature_in_scaled_domain(cx, cy, cz, params.seed) / params.frequency;
}

VoronoiSample voronoi3(const Vec3& p, const NoiseParams& params) {
  params.validate("voronoi3");
  const Vec3 q = p * params.frequency;
  const auto cx = static_cast<std::int64_t>(std::floor(q.x));
  const auto cy = static_cast<std::int64_t>(std::floor(q.y));
  const auto cz = static_cast<std::int64_t>(std::floor(q.z));
  double best = std::numeric_limits<double>::infinity();
  std::int64_t bx = cx;
  std::int64_t by = cy;
  std::int64_t bz = cz;
  for (std::int64_t dz = -1; dz <= 1; ++dz) {
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        const Vec3 f = feature_in_scaled_domain(cx + dx, cy + dy, cz + dz, params.seed);
        const Vec3 d = q - f;
        const double d2 = dot(d, d);
        if (d2 < best) {
          best = d2;
          bx = cx + dx;
          by = cy + dy;
          bz = cz + dz;
        }
      }
    }
  }
  return {std::sqrt(best) / params.frequency, voronoi_cell_id(bx, by, bz, params.seed)};
}

}  // namespace plume
