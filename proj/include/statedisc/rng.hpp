#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace statedisc {

using Rng = std::mt19937_64;

// splitmix64 finalizer; the basis of all seed derivation.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic per-run seed chain over (top-level seed, cell, run). The
// run offset keeps derive_seed(s, c, 0) distinct from mix64(mix64(s) ^ c).
constexpr std::uint64_t derive_seed(std::uint64_t top, std::uint64_t cell,
                                    std::uint64_t run) {
  return mix64(mix64(mix64(top) ^ cell) ^ (run + 0x632be59bd9b4e019ULL));
}

// Uniform in [0,1) from the top 53 bits. Explicit so the variate stream
// does not depend on libstdc++ distribution internals.
inline double uniform_double(Rng& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_double(rng);
}

// Standard normal via Box-Muller (cosine branch only, one fresh pair per
// call, so the stream stays a pure function of the generator state).
inline double normal_double(Rng& rng) {
  double u1;
  do {
    u1 = uniform_double(rng);
  } while (u1 <= 0.0);
  double u2 = uniform_double(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace statedisc
