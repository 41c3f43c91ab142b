#pragma once

#include <cstdint>
#include <string_view>

namespace pairjudge {

/// Deterministic random stream with platform-independent output.
///
/// splitmix64 for the bit stream and an explicit Box-Muller transform for
/// normal deviates, so identical seeds give identical doubles on every
/// platform (std::normal_distribution does not guarantee that).
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : state_(seed) {}

    /// Stream keyed by (seed, label): independent sub-streams from one seed.
    static RandomStream from_label(std::uint64_t seed, std::string_view label);

    std::uint64_t next_u64();

    /// Uniform in [0, 1) with 53 bits of mantissa.
    double next_unit();

    /// Uniform in [lo, hi).
    double next_in(double lo, double hi);

    /// Standard normal deviate.
    double next_gaussian();

private:
    std::uint64_t state_;
};

}  // namespace pairjudge
