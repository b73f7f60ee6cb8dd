#pragma once

#include <cstdint>
#include <random>

namespace gsmp {

// Seedable deterministic stream. Unit doubles are made from the top 53 bits
// of the engine output, so replay is bit-exact for a fixed seed.
class RngStream {
public:
  explicit RngStream(std::uint64_t seed) : eng_(seed) {}

  // uniform in [0, 1)
  double next_unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  std::uint64_t next_u64() { return eng_(); }

  // uniform integer in [0, n), unbiased
  std::uint64_t next_below(std::uint64_t n) {
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = eng_();
      if (r >= threshold) return r % n;
    }
  }

private:
  std::mt19937_64 eng_;
};

// Per-task seed derivation: splitmix64 over (master, index). Results are
// independent of worker count as long as tasks keep their index.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t x = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  for (int i = 0; i < 2; ++i) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
  }
  return x;
}

}  // namespace gsmp
