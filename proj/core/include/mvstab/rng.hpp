#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace mvstab::rng {

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Pure function of (seed, a, b, c); used as a counter-based stream so the
// draw for a given (particle, step, component) never depends on scheduling.
inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t a,
                                  std::uint64_t b, std::uint64_t c) {
    std::uint64_t h = mix64(seed ^ 0x2545f4914f6cdd1dULL);
    h = mix64(h ^ (a * 0xd1342543de82ef95ULL));
    h = mix64(h ^ (b * 0xaf251af3b0f025b5ULL));
    h = mix64(h ^ (c * 0x9e3779b97f4a7c15ULL));
    return h;
}

// Map to (0, 1]; never returns 0 so log() below is safe.
inline double to_open_unit(std::uint64_t u) {
    return static_cast<double>((u >> 11) + 1) * 0x1.0p-53;
}

// Standard normal, counter-based (Box-Muller, cosine branch).
inline double standard_normal(std::uint64_t seed, std::uint64_t particle,
                              std::uint64_t step, std::uint64_t component) {
    const double u1 = to_open_unit(counter_hash(seed, particle, step, 2 * component));
    const double u2 = to_open_unit(counter_hash(seed, particle, step, 2 * component + 1));
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

// Gaussian(0, dt*I) increment of an m-dimensional Brownian motion.
inline void brownian_increment(std::uint64_t seed, std::uint64_t particle,
                               std::uint64_t step, double dt,
                               std::span<double> out) {
    const double s = std::sqrt(dt);
    for (std::size_t c = 0; c < out.size(); ++c)
        out[c] = s * standard_normal(seed, particle, step, c);
}

// Derives a per-(size, replication) seed for replicated experiments.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return counter_hash(base, a, b, 0x5eedULL);
}

}  // namespace mvstab::rng
