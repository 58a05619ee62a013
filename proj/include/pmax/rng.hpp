#pragma once

// Deterministic RNG for all Monte Carlo work. xoshiro256++ seeded through
// splitmix64, so a (seed, stream) pair always yields the same draws on any
// platform and under any thread schedule.

#include <cstdint>
#include <cmath>

#include "pmax/special.hpp"

namespace pmax {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Counter-based substream derivation: replication r of a run seeded with s
// always uses substream_seed(s, r), independent of execution order.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t state = seed;
    std::uint64_t a = splitmix64(state);
    state = a ^ (stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL);
    return splitmix64(state);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t state = seed;
        for (auto& w : s_) w = splitmix64(state);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Strictly inside (0,1); safe as input to inverse-transform sampling.
    double uniform01() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1p-53;
    }

    double uniform(double a, double b) { return a + uniform01() * (b - a); }

    double normal() { return normal_quantile(uniform01()); }

    double exponential() { return -std::log(uniform01()); }

    // Marsaglia-Tsang; shape < 1 handled by the boost trick.
    double gamma(double shape) {
        if (shape < 1.0) {
            const double u = uniform01();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform01();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

}  // namespace pmax
