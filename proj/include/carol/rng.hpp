// Deterministic random number generation.
//
// Every stochastic component draws from this single counter-based generator
// (splitmix64: Steele, Lea & Flood, "Fast splittable pseudorandom number
// generators"). The generator is pure integer arithmetic on fixed 64-bit
// constants, so a given (seed, stream) pair yields the same sequence on every
// platform and compiler. Distinct subsystems take distinct stream ids so that
// e.g. proposal sampling and accept/reject draws never share a sequence.

#pragma once

#include <cstdint>

namespace carol {

inline std::uint64_t splitmix64_mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    // Stream derivation is itself a splitmix64 step, so (seed, s) and
    // (seed, s+1) start from decorrelated states.
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : state_(splitmix64_mix(seed) ^ splitmix64_mix(0x5851f42d4c957f2dULL + stream)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits; exact on every platform.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform index in [0, n). Computed as floor(u * n); the modulo-free form
    // keeps the draw identical across platforms (the ~2^-53 bias is far below
    // anything the frequency tests can resolve).
    std::size_t uniform_index(std::size_t n) {
        std::size_t i = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

private:
    std::uint64_t state_;
};

}  // namespace carol
