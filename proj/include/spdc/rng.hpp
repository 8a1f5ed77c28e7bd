#pragma once

#include <cmath>
#include <cstdint>

namespace spdc {

/// Stream identifiers. Each consumer of randomness derives its own stream from
/// the user seed so that, e.g., data generation and solver sampling with the
/// same seed are uncorrelated.
enum class RngStream : std::uint64_t {
  solver = 1,
  synthetic_data = 2,
  sparse_data = 3,
};

/// Counter-based 64-bit generator.
///
/// The i-th output is mix(key + (i + 1) * golden), i.e. the SplitMix64
/// sequence started at `key`, so any position of the stream can be reached in
/// O(1). The key is derived from (seed, stream) with the same finalizer. Every
/// sampling routine built on top of it consumes a fixed, documented number of
/// outputs per draw so that two solvers running on the same stream see the
/// same sequence of indices.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, RngStream stream)
      : key_(mix(mix(seed) ^ (static_cast<std::uint64_t>(stream) * kGolden + kStreamSalt))) {}

  std::uint64_t next() { return mix(key_ + (++counter_) * kGolden); }

  std::uint64_t counter() const { return counter_; }

  /// Uniform integer in [0, n). Lemire's multiply-shift with rejection; n > 0.
  std::uint64_t uniform_index(std::uint64_t n) {
    __uint128_t m = static_cast<__uint128_t>(next()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<__uint128_t>(next()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; consumes exactly two outputs per call.
  double normal() {
    double u1 = 1.0 - uniform01();  // (0, 1]
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace spdc
