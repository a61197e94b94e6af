#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace rulediff {

// splitmix64 (Steele, Lea, Flood 2014). Chosen over std engines because the
// shuffled-partition sequence is part of the determinism contract: the same
// seed must yield bit-identical partitions on every platform and worker
// count, and a fresh stream per permutation iteration must be cheap to seed.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
};

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Independent stream for one permutation iteration. Streams depend only on
// (seed, index), never on which worker thread runs the iteration.
inline SplitMix64 iteration_stream(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(mix64(seed + 0x9e3779b97f4a7c15ull * (index + 1)));
}

// Uniform draw in [0, n) by rejection; unbiased for any n >= 1.
inline std::uint64_t bounded_draw(SplitMix64& g, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = g.next();
    if (r >= threshold) return r % n;
  }
}

template <typename T>
void fisher_yates(std::span<T> v, SplitMix64& g) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(bounded_draw(g, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace rulediff
