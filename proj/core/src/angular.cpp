#include "plume/angular.hpp"

#include <cmath>
#include <string>

#include "plume/error.hpp"
#include "plume/noise.hpp"
#include "plume/vec.hpp"

namespace plume {

AngularWeights::AngularWeights() { weights_.fill(1.0 / kAngularSections); }

AngularWeights AngularWeights::from_raw(const Array& raw) {
  double total = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!(raw[i] >= 0.0) || !std::isfinite(raw[i])) {
      throw ConfigError("angular weight " + std::to_string(i) + " is negative or not finite");
    }
    total += raw[i];
  }
  if (!(total > 0.0)) throw DegenerateDistributionError("angular distribution has no positive section");
  AngularWeights out;
  for (std::size_t i = 0; i < raw.size(); ++i) out.weights_[i] = raw[i] / total;
  return out;
}

double AngularWeights::sum() const {
  double total = 0.0;
  for (const double w : weights_) total += w;
  return total;
}

bool AngularWeights::valid(double tolerance) const {
  for (const double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) return false;
  }
  return std::abs(sum() - 1.0) <= tolerance;
}

int AngularWeights::argmax() const {
  int best = 0;
  for (int i = 1; i < kAngularSections; ++i) {
    if (weights_[static_cast<std::size_t>(i)] > weights_[static_cast<std::size_t>(best)]) best = i;
  }
  return best;
}

double circular_distance_deg(double a, double b) {
  double d = std::fmod(std::abs(a - b), 360.0);
  return d > 180.0 ? 360.0 - d : d;
}

AngularWeights gaussian_weights(double mean_deg, double sigma_deg) {
  if (!(sigma_deg > 0.0) || !std::isfinite(sigma_deg)) {
    throw ConfigError("gaussian sigma_deg must be > 0 (got " + std::to_string(sigma_deg) + ")");
  }
  if (!std::isfinite(mean_deg)) throw ConfigError("gaussian mean_deg must be finite");
  const double offset = mean_deg - std::floor(mean_deg);
  const double inv_two_var = 1.0 / (2.0 * sigma_deg * sigma_deg);
  AngularWeights::Array raw{};
  for (int i = 0; i < kAngularSections; ++i) {
    const double d = circular_distance_deg(i + offset, mean_deg);
    raw[static_cast<std::size_t>(i)] = std::exp(-d * d * inv_two_var);
  }
  return AngularWeights::from_raw(raw);
}

AngularWeights perlin_weights(std::uint64_t seed, double frequency) {
  if (!(frequency > 0.0) || !std::isfinite(frequency)) {
    throw ConfigError("perlin frequency must be > 0 (got " + std::to_string(frequency) + ")");
  }
  // Sampling along a circle whose circumference is `frequency` lattice units keeps the
  // sequence periodic for non-integer frequencies too.
  const NoiseParams params{.seed = seed, .frequency = 1.0, .octaves = 1, .lacunarity = 2.0, .gain = 0.5};
  const double radius = frequency / (2.0 * kPi);
  AngularWeights::Array raw{};
  for (int i = 0; i < kAngularSections; ++i) {
    const double theta = deg_to_rad(static_cast<double>(i));
    const Vec3 p{radius * std::cos(theta), radius * std::sin(theta), 0.5};
    raw[static_cast<std::size_t>(i)] = 0.5 * (perlin3(p, params) + 1.0);
  }
  return AngularWeights::from_raw(raw);
}

AngularWeights hybrid_weights(const AngularWeights& g, const AngularWeights& p, double blend) {
  if (!(blend >= 0.0 && blend <= 1.0)) {
    throw ConfigError("hybrid blend must be in [0, 1] (got " + std::to_string(blend) + ")");
  }
  if (blend == 0.0) return g;
  if (blend == 1.0) return p;
  AngularWeights::Array raw{};
  for (int i = 0; i < kAngularSections; ++i) raw[static_cast<std::size_t>(i)] = (1.0 - blend) * g[i] + blend * p[i];
  return AngularWeights::from_raw(raw);
}

int sample_section(const AngularWeights& w, Rng& rng) {
  const auto& values = w.values();
  double total = 0.0;
  int last_positive = -1;
  for (int i = 0; i < kAngularSections; ++i) {
    if (values[static_cast<std::size_t>(i)] > 0.0) last_positive = i;
    total += values[static_cast<std::size_t>(i)];
  }
  if (last_positive < 0) throw DegenerateDistributionError("cannot sample from an all-zero angular distribution");
  const double u = rng.uniform01() * total;
  double cumulative = 0.0;
  for (int i = 0; i < kAngularSections; ++i) {
    cumulative += values[static_cast<std::size_t>(i)];
    if (cumulative > u && values[static_cast<std::size_t>(i)] > 0.0) return i;
  }
  return last_positive;
}

}  // namespace plume
