#pragma once

// Counter-based random numbers: every variate is a pure function of
// (seed, path, step, slot), so path-level parallelism cannot change results
// and any path can be regenerated in isolation.  The generator is a SplitMix64
// finalizer chained over the counter words; normals use Box-Muller with a
// fixed consumption of two hashes per variate.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace she {

namespace rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

inline std::uint64_t hash(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t z = seed + kGolden;
    z = mix(z ^ (a + 0xC2B2AE3D27D4EB4Full));
    z = mix(z ^ (b + 0x165667B19E3779F9ull));
    z = mix(z ^ (c + kGolden));
    return mix(z);
}

// uniform in (0, 1]: safe as a log argument
inline double u01_pos(std::uint64_t h) {
    return (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;
}

// uniform in [0, 1)
inline double u01(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

// standard normal, deterministic in (seed, path, step, slot)
inline double normal(std::uint64_t seed, std::uint64_t path, std::uint64_t step, std::uint64_t slot) {
    const double r = std::sqrt(-2.0 * std::log(u01_pos(hash(seed, path, step, 2 * slot))));
    const double theta = 2.0 * std::numbers::pi * u01(hash(seed, path, step, 2 * slot + 1));
    return r * std::cos(theta);
}

// uniform in (0, 1], deterministic in (seed, path, counter)
inline double uniform_pos(std::uint64_t seed, std::uint64_t path, std::uint64_t counter) {
    return u01_pos(hash(seed, path, counter, 0x75ull));
}

} // namespace rng

} // namespace she
