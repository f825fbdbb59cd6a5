#pragma once

// Deterministic randomness for every simulation component.
//
// Generator: std::mt19937_64 (its output sequence is fixed by the standard,
// so streams replay identically across toolchains). Reals and bounded
// integers are derived from raw 64-bit outputs here rather than through
// <random> distributions, whose algorithms are implementation-defined.
// Sub-seeds are derived with the SplitMix64 finalizer.

#include <cstdint>
#include <random>

namespace htsim {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent seed for stream `index` under a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return splitmix64(master ^ splitmix64(index + 0x5851f42d4c957f2dULL));
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 bits of resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    // Uniform on [0, bound); bound > 0. Rejection sampling, no modulo bias.
    std::uint64_t uniform_below(std::uint64_t bound) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    std::uint8_t byte() { return static_cast<std::uint8_t>(engine_() >> 56); }

  private:
    std::mt19937_64 engine_;
};

} // namespace htsim
