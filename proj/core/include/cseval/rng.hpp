#pragma once

#include <cstdint>

namespace cseval {

/// Finalizer-style 64-bit mixer (SplitMix64 output function). Full avalanche,
/// bijective on uint64.
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

/// SplitMix64 generator. Tiny, seedable, and identical on every platform,
/// which is what the resampling code needs: the standard <random>
/// distributions are implementation-defined and would break cross-toolchain
/// reproducibility.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform draw in [0, n) via multiply-shift. Bias is < n / 2^64.
  std::uint64_t bounded(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  /// Uniform double in [0, 1) with 53 bits of precision.
  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

private:
  std::uint64_t state_;
};

/// Derives the generator for one resample (or any other substream) from a
/// master seed and a stream index. Streams are decorrelated by hashing, so
/// substreams can be evaluated in any order, or in parallel, and still give
/// results identical to sequential execution.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(mix64(mix64(seed) + 0x9E3779B97F4A7C15ULL * (index + 1)));
}

}  // namespace cseval
