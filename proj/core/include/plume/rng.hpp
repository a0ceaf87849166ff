#pragma once

#include <cstdint>
#include <string_view>

namespace plume {

/// SplitMix64 finalizer (Steele, Lea & Flood 2014). Bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Order-sensitive combination of two 64-bit values.
std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept;

/// 64-bit FNV-1a over the bytes of `text`.
std::uint64_t hash_string(std::string_view text) noexcept;

/// SplitMix64 generator.
///
/// The state advances by the golden-ratio increment 0x9e3779b97f4a7c15 and each output is the
/// mixed state. The algorithm is fixed so that every seed yields the same sequence on every
/// platform; standard-library distributions are deliberately not used because their output
/// is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next_u64() noexcept;
  /// Uniform double in [0, 1) built from the top 53 bits.
  double uniform01() noexcept;
  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) noexcept;
  /// Unbiased uniform integer in [0, bound). `bound` must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;
  /// Unbiased uniform integer in [lo, hi] (inclusive).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept;
  bool bernoulli(double p) noexcept;

  [[nodiscard]] std::uint64_t state() const noexcept { return state_; }

  /// Independent stream for (master seed, tag, index). Streams with distinct tags or indices
  /// are decorrelated through two rounds of mixing.
  static Rng stream(std::uint64_t master, std::string_view tag, std::uint64_t index = 0) noexcept;

 private:
  std::uint64_t state_;
};

/// Derives a child seed from a master seed and a label, the same way `Rng::stream` does.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index = 0) noexcept;

}  // namespace plume
