#pragma once

#include <cmath>
#include <cstdint>

namespace lht::rng {

// Counter-based generator (SplitMix64 mixing function over an additive
// counter).  A substream is fully determined by (seed, stream index), so a
// replication produces the same draws no matter which thread runs it.
class Stream {
public:
    // The stream key is hashed through the mixer so distinct streams start at
    // unrelated offsets of the counter orbit (an additive offset alone would
    // make stream k+1 a one-step shift of stream k).
    Stream(std::uint64_t seed, std::uint64_t stream_index)
        : state_(mix(mix(seed ^ 0x6A09E667F3BCC909ull) +
                     0xD1B54A32D192ED03ull * (stream_index + 1))) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    // uniform on the open interval (0, 1); safe to pass through log()
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Box-Muller pair of independent standard normals
    void normal_pair(double& a, double& b) {
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double m = std::sqrt(-2.0 * std::log(u1));
        a = m * std::cos(6.283185307179586476925286766559 * u2);
        b = m * std::sin(6.283185307179586476925286766559 * u2);
    }

    // Gamma(shape=4, scale=0.5) - 2: mean 0, variance 1
    double gamma4_shifted() {
        const double e = -std::log(uniform01() * uniform01() *
                                   uniform01() * uniform01());
        return 0.5 * e - 2.0;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

} // namespace lht::rng
