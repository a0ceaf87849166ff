#include <algorithm>
#include <cmath>
#include <string>

#include "plume/error.hpp"
#include "plume/texture.hpp"

namespace plume {

namespace {

void check_unit(double v, std::string_view where, const char* key) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ConfigError(std::string(where) + "." + key + " (" + std::to_string(v) + ") must lie in [0, 1]");
  }
}

void check_rgb(const Rgb& c, std::string_view where, const char* key) {
  for (const double v : {c.r, c.g, c.b}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ConfigError(std::string(where) + "." + key + " components must lie in [0, 1]");
    }
  }
}

inline double smoothstep(double e0, double e1, double x) {
  const double t = std::clamp((x - e0) / (e1 - e0), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

// Cell-border band of the cellular noise, in scaled-domain distance units.
constexpr double kVeinStart = 0.48;
constexpr double kVeinFull = 0.6;

}  // namespace

void MaterialParams::validate(std::string_view where) const {
  check_rgb(base_color_a, where, "base_color_a");
  check_rgb(base_color_b, where, "base_color_b");
  color_noise.validate(std::string(where) + ".color_noise");
  vein_noise.validate(std::string(where) + ".vein_noise");
  height_noise.validate(std::string(where) + ".height_noise");
  check_unit(vein_strength, where, "vein_strength");
  check_unit(roughness_base, where, "roughness_base");
  check_unit(roughness_variation, where, "roughness_variation");
  check_unit(humidity, where, "humidity");
  if (!(height_amplitude >= 0.0) || !std::isfinite(height_amplitude)) {
    throw ConfigError(std::string(where) + ".height_amplitude (" + std::to_string(height_amplitude) +
                      ") must be finite and >= 0");
  }
  if (roughness_base - roughness_variation < 0.0 || roughness_base + roughness_variation > 1.0) {
    throw ConfigError(std::string(where) + ".roughness_base (" + std::to_string(roughness_base) + ") +/- " +
                      std::string(where) + ".roughness_variation (" + std::to_string(roughness_variation) +
                      ") must stay within [0, 1]");
  }
}

MaterialSample material_eval(const Vec3& p, const Vec3& /*n*/, const MaterialParams& m) {
  const double c = perlin3(p, m.color_noise);
  const double t = 0.5 * (c + 1.0);
  const VoronoiSample cell = voronoi3(p, m.vein_noise);
  const double edge = smoothstep(kVeinStart, kVeinFull, cell.f1 * m.vein_noise.frequency);
  const double darken = 1.0 - m.vein_strength * edge;

  MaterialSample s;
  s.albedo = {lerp(m.base_color_a.r, m.base_color_b.r, t) * darken, lerp(m.base_color_a.g, m.base_color_b.g, t) * darken,
              lerp(m.base_color_a.b, m.base_color_b.b, t) * darken};
  s.height = m.height_amplitude == 0.0 ? 0.0 : perlin3(p, m.height_noise) * m.height_amplitude;
  s.roughness_unclamped = m.roughness_base + m.roughness_variation * c - 0.5 * m.humidity;
  s.roughness = std::clamp(s.roughness_unclamped, 0.0, 1.0);
  return s;
}

bool is_supported_resolution(int resolution) {
  return resolution >= kMinTextureResolution && resolution <= kMaxTextureResolution &&
         (resolution & (resolution - 1)) == 0;
}

std::array<std::uint8_t, 3> encode_normal(const Vec3& n) {
  std::array<std::uint8_t, 3> out{};
  for (int a = 0; a < 3; ++a) {
    const double c = std::clamp(n[a], -1.0, 1.0);
    out[static_cast<std::size_t>(a)] = static_cast<std::uint8_t>(std::floor((c + 1.0) * 0.5 * 255.0 + 0.5));
  }
  return out;
}

Vec3 decode_normal(const std::uint8_t* rgb) {
  return {rgb[0] / 255.0 * 2.0 - 1.0, rgb[1] / 255.0 * 2.0 - 1.0, rgb[2] / 255.0 * 2.0 - 1.0};
}

std::uint8_t encode_srgb(double linear) {
  const double x = std::clamp(linear, 0.0, 1.0);
  const double s = x <= 0.0031308 ? 12.92 * x : 1.055 * std::pow(x, 1.0 / 2.4) - 0.055;
  return static_cast<std::uint8_t>(std::floor(s * 255.0 + 0.5));
}

}  // namespace plume
