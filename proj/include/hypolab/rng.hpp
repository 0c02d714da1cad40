#pragma once

#include <cstdint>
#include <cmath>

namespace hypo {

// Counter-based random stream: every draw is a pure function of
// (seed, stream, counter, slot), so parallel particle updates are
// bit-reproducible for any thread count.

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t counter_mix(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter,
                                 std::uint64_t slot) {
  std::uint64_t h = splitmix64(seed ^ 0x8f1bbcdcbfa53e0bull);
  h = splitmix64(h ^ stream);
  h = splitmix64(h ^ counter);
  h = splitmix64(h ^ slot);
  return h;
}

/// uniform in (0, 1)
inline double u01(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

/// standard normal via Box-Muller on two counter draws
inline double normal_draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter,
                          std::uint64_t slot) {
  double u1 = u01(counter_mix(seed, stream, counter, 2 * slot));
  double u2 = u01(counter_mix(seed, stream, counter, 2 * slot + 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace hypo
