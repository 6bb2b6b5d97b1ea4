#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace hqpulse::rng {

// SplitMix64 (Steele, Lea, Flood). Integer-only, so streams are identical
// across platforms and runs; all randomized components of the library sit
// on top of this generator.
struct SplitMix64 {
  std::uint64_t state = 0;

  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
};

inline std::uint64_t hash_word(std::uint64_t x) {
  SplitMix64 s{x};
  return s.next();
}

// Independent stream addressed by (seed, a, b). The search derives one
// stream per (seed, generation, individual), which makes results
// independent of evaluation order.
class Stream {
 public:
  explicit Stream(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t h = hash_word(seed);
    h ^= hash_word(a + 0x9e3779b97f4a7c15ull) * 0xff51afd7ed558ccdull;
    h ^= hash_word(b + 0xc2b2ae3d27d4eb4full) * 0xc4ceb9fe1a85ec53ull;
    sm_.state = h;
  }

  std::uint64_t next_u64() { return sm_.next(); }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n), n > 0
  std::uint32_t uniform_int(std::uint32_t n) {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Box-Muller, cosine branch
  double gaussian(double sigma = 1.0) {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return sigma * std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  SplitMix64 sm_;
};

}  // namespace hqpulse::rng
