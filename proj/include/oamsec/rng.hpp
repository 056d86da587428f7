#pragma once

#include <cstdint>
#include <random>

#include "oamsec/types.hpp"

namespace oamsec {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Independent stream seed for (seed, a, b); lets parallel loops draw the same
// numbers as their serial counterparts regardless of scheduling.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ (b + 0x632BE59BD9B4E019ULL));
}

using Rng = std::mt19937_64;

// Circularly-symmetric complex normal with E|z|^2 = variance.
inline cplx complex_normal(Rng& rng, double variance) {
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5 * variance));
    const double re = nd(rng);
    const double im = nd(rng);
    return {re, im};
}

inline cvec complex_normal_vector(Rng& rng, Eigen::Index n, double variance) {
    cvec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = complex_normal(rng, variance);
    return v;
}

inline cvec random_phases(Rng& rng, Eigen::Index n) {
    std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
    cvec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = std::polar(1.0, u(rng));
    return v;
}

}  // namespace oamsec
