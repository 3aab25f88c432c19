#pragma once

#include <cmath>
#include <cstdint>

#include "marvv/geometry.hpp"

namespace marvv {

/// Counter-based random stream: draw n is a pure function of (seed, n).
///
/// Uses the SplitMix64 finalizer over seed + n * golden-gamma, so a stream can
/// be reproduced, skipped, or checkpointed by its counter alone. Gaussians use
/// Box-Muller rather than std::normal_distribution, whose output is not
/// specified by the standard and differs between library implementations.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t counter = 0) : seed_(seed), counter_(counter) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }

    std::uint64_t next_u64() { return mix(seed_ + kGamma * ++counter_); }

    /// Uniform in (0, 1); never returns 0 so log() is safe.
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t counter_;
};

}  // namespace marvv
