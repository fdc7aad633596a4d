#pragma once

#include <cstdint>
#include <random>

namespace dialogseg {

// Maps the top 53 bits of the engine output to [0,1). Used instead of
// std::uniform_real_distribution so that seeded runs are byte-identical
// across standard library implementations.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

}  // namespace dialogseg
