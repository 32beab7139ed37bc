#pragma once

#include <cstdint>
#include <random>

namespace bcdi {

/// Seeded engine shared by every stochastic routine in the library.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits of one draw. Unlike
/// std::uniform_real_distribution its output is specified bit-for-bit.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace bcdi
