#pragma once

#include <cstdint>

namespace dsc {

// SplitMix64. Pinned here (not std::) so that workload bytes are identical
// across platforms and standard-library versions.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Unbiased-enough fixed-point draw in [0, n); uses the high 64 bits of the
  // 128-bit product, which is deterministic everywhere we build.
  uint64_t next_below(uint64_t n) {
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  uint64_t state_;
};

}  // namespace dsc
