#pragma once

#include <cstdint>
#include <random>

namespace css::sim {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Engine for substream `index` of root seed `seed`. The mapping is a
/// pure function of (seed, index), so replication i always sees the same
/// stream no matter how replications are scheduled across threads.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t w0 = splitmix64(seed ^ splitmix64(index));
  const std::uint64_t w1 = splitmix64(w0 ^ 0xA3C59AC2F0ED4421ULL);
  std::seed_seq seq{static_cast<std::uint32_t>(w0), static_cast<std::uint32_t>(w0 >> 32),
                    static_cast<std::uint32_t>(w1), static_cast<std::uint32_t>(w1 >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace css::sim
