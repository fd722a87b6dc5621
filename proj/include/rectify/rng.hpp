#pragma once

#include <cstdint>

namespace rectify {

/// Counter-based pseudo-random stream. Each (seed, stream) pair names an
/// independent sequence: output k is a fixed-point mix of
/// key + (k+1) * golden-ratio increment (the SplitMix64 output function),
/// where the key itself is a mix of the seed and the stream index. Streams
/// can therefore be created in any order, on any thread, and always yield
/// the same numbers. The generator is fixed; changing it changes every
/// seeded result.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix(mix(seed + kGolden) ^ mix(stream + kStreamSalt))) {}

  std::uint64_t next_u64() {
    counter_ += kGolden;
    return mix(key_ + counter_);
  }

  /// Uniform double in the open interval (0, 1).
  double next_open01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound), bound >= 1. Rejection sampling, no
  /// modulo bias.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t x = next_u64();
      if (x >= threshold) return x % bound;
    }
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kStreamSalt = 0x5851f42d4c957f2dULL;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace rectify
