#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hqsl::rng {

// splitmix64 finalizer; used both as a bit mixer and for deriving
// independent sub-seeds from a base seed.
inline std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive(std::uint64_t base, std::uint64_t stream) {
    return mix(base ^ mix(stream));
}

inline std::uint64_t derive(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return derive(derive(base, a), b);
}

// Uniform double in [0, 1) with 53 bits of randomness. We avoid
// std::uniform_real_distribution because its output is not pinned by the
// standard; this keeps seeded runs reproducible across toolchains.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Uniform double in [lo, hi).
inline double uniform(std::mt19937_64& gen, double lo, double hi) {
    return lo + (hi - lo) * uniform01(gen);
}

// Standard normal via Box-Muller (deterministic draw order: two uniforms per call).
inline double normal01(std::mt19937_64& gen) {
    double u1 = uniform01(gen);
    double u2 = uniform01(gen);
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

// Uniform integer in [0, n).
inline std::uint64_t below(std::mt19937_64& gen, std::uint64_t n) {
    return gen() % n;
}

}  // namespace hqsl::rng
