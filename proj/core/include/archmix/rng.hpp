#pragma once

#include <cstdint>

namespace archmix {

// SplitMix64 stream (Steele, Lea & Flood 2014). Chosen over the standard
// engines because the whole state is one word, streams are cheap to derive,
// and the output sequence is identical on every platform, which the
// reproducibility contract depends on.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform draw strictly inside (0,1): 53-bit mantissa, offset by half an ulp
  // so inverse CDFs never see 0 or 1.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

// 64-bit finalizer used to derive per-replicate stream seeds:
// stream_seed(r) = finalize(master_seed ^ r).
inline std::uint64_t splitmix_finalize(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline SplitMix64 replicate_stream(std::uint64_t master_seed, std::uint64_t replicate) {
  return SplitMix64(splitmix_finalize(master_seed ^ replicate));
}

}  // namespace archmix
