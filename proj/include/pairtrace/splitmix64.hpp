#pragma once

#include <cstdint>

namespace pairtrace {

// splitmix64, the 64-bit splittable generator of Steele, Lea and Flood
// (the JDK's SplittableRandom). State advances by the golden-ratio gamma;
// output goes through a murmur-style finalizer. Hand-rolled rather than
// taken from <random> because std distributions are implementation-defined
// and every byte of generated workloads must reproduce from (seed,
// parameters) alone, on any platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform draw from [0, bound) by 128-bit multiply-shift. The bias is
  // below bound/2^64, irrelevant for workload generation.
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  // Uniform double in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Independent child stream; the parent advances once.
  SplitMix64 split() { return SplitMix64(next()); }

 private:
  std::uint64_t state_;
};

}  // namespace pairtrace
