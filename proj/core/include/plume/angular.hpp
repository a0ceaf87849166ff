#pragma once

#include <array>
#include <cstdint>

#include "plume/rng.hpp"

namespace plume {

inline constexpr int kAngularSections = 360;

/// Spawn probability for each one-degree section of the circle around a node.
/// Section i covers direction i degrees, measured counter-clockwise from +x.
class AngularWeights {
 public:
  using Array = std::array<double, kAngularSections>;

  /// Uniform distribution.
  AngularWeights();

  /// Normalizes `raw` to unit sum. Throws ConfigError on negative/non-finite entries and
  /// DegenerateDistributionError if every entry is zero.
  static AngularWeights from_raw(const Array& raw);

  [[nodiscard]] double operator[](int section) const { return weights_[static_cast<std::size_t>(section)]; }
  [[nodiscard]] const Array& values() const { return weights_; }
  [[nodiscard]] double sum() const;
  /// Length, non-negativity and unit sum within `tolerance`.
  [[nodiscard]] bool valid(double tolerance = 1e-9) const;
  /// Index of the largest weight (lowest index on ties).
  [[nodiscard]] int argmax() const;

  bool operator==(const AngularWeights&) const = default;

 private:
  Array weights_{};
};

/// Circular distance in degrees, in [0, 180].
double circular_distance_deg(double a, double b);

/// Wrapped Gaussian over the circle. Each section is sampled at i + frac(mean_deg), so the
/// section containing the mean carries the peak.
AngularWeights gaussian_weights(double mean_deg, double sigma_deg);

/// Periodic gradient noise sampled at the 360 section angles, shifted to [0, 1] and normalized.
/// `frequency` is in cycles per revolution.
AngularWeights perlin_weights(std::uint64_t seed, double frequency);

/// Convex combination (1 - blend) * g + blend * p, renormalized.
AngularWeights hybrid_weights(const AngularWeights& g, const AngularWeights& p, double blend);

/// Inverse-CDF draw of a section index. Never returns a zero-weight section.
int sample_section(const AngularWeights& w, Rng& rng);

}  // namespace plume
