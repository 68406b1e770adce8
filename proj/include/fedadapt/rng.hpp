#pragma once

#include <cmath>
#include <cstdint>

namespace fedadapt {

// Deterministic RNG built on splitmix64. The standard <random> distributions
// are implementation-defined, which would break bit-exact replay across
// toolchains, so all draws go through the explicit algorithms below.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stateless mix of a seed with up to two counters; used to derive
// independent substreams (per round, per device, per purpose).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = seed;
    s ^= splitmix64(a += 0x632be59bd9b4e019ULL);
    std::uint64_t t = s;
    s ^= splitmix64(b += 0x2545f4914f6cdd1dULL) + splitmix64(t);
    return splitmix64(s);
}

class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform in (0, 1]; never returns 0 so log() is safe.
    double uniform() {
        const std::uint64_t bits = next_u64() >> 11;  // 53 bits
        return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller (no cached spare; two uniforms per draw).
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793238462643 * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Index in [0, n); n must be > 0. Modulo bias is irrelevant at our scales.
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

private:
    std::uint64_t state_;
};

}  // namespace fedadapt
