#pragma once

#include <cstdint>
#include <string_view>

namespace shortmk {

// Deterministic across platforms and compilers, unlike the std
// distributions. Everything that needs reproducible randomness (subset
// draws, tie breaking, dataset selection) goes through this.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Unbiased integer in [0, n). n must be > 0.
  std::uint64_t uniform_below(std::uint64_t n) {
    std::uint64_t mask = ~0ull >> __builtin_clzll(n | 1ull);
    for (;;) {
      std::uint64_t v = next() & mask;
      if (v < n) return v;
    }
  }

  double uniform01() { return (next() >> 11) * (1.0 / 9007199254740992.0); }

 private:
  std::uint64_t state_;
};

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  Rng r(a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2)));
  return r.next();
}

}  // namespace shortmk
