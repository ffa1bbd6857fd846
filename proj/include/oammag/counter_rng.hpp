#pragma once

#include <cmath>
#include <cstdint>

#include "oammag/units.hpp"

namespace oammag {

// Counter-based random stream: every draw is a pure function of
// (seed, stream, position), so parallel evaluation order cannot change
// the output.
inline uint64_t mix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline uint64_t stream_key(uint64_t seed, uint64_t stream) {
    return mix64(seed ^ mix64(stream + 0x632BE59BD9B4E019ull));
}

// Uniform in (0, 1); never returns 0, safe under log().
inline double unit_uniform(uint64_t key, uint64_t pos) {
    const uint64_t z = mix64(key + pos * 0xD1342543DE82EF95ull);
    return (static_cast<double>(z >> 11) + 0.5) * 0x1p-53;
}

// Standard normal draw consuming stream positions 2n and 2n+1.
inline double unit_gaussian(uint64_t key, uint64_t n) {
    const double u1 = unit_uniform(key, 2 * n);
    const double u2 = unit_uniform(key, 2 * n + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
}

// Poisson draw with the given mean. Knuth's product method for small means,
// clamped rounded-normal approximation above 50.
inline double poisson_draw(double mean, uint64_t key) {
    if (mean <= 0.0) return 0.0;
    if (mean < 50.0) {
        const double limit = std::exp(-mean);
        double p = 1.0;
        uint64_t k = 0;
        uint64_t pos = 0;
        do {
            p *= unit_uniform(key, pos++);
            ++k;
        } while (p > limit);
        return static_cast<double>(k - 1);
    }
    const double z = unit_gaussian(key, 0);
    const double v = std::llround(mean + std::sqrt(mean) * z);
    return v > 0.0 ? v : 0.0;
}

} // namespace oammag
