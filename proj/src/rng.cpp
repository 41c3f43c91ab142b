#include "pairjudge/rng.hpp"

#include <cmath>
#include <numbers>

#include "pairjudge/digest.hpp"

namespace pairjudge {

RandomStream RandomStream::from_label(std::uint64_t seed, std::string_view label) {
    std::string key;
    key.reserve(8 + label.size());
    for (int i = 0; i < 8; ++i) {
        key.push_back(static_cast<char>((seed >> (8 * i)) & 0xff));
    }
    key.append(label);
    return RandomStream(digest_to_seed(key));
}

std::uint64_t RandomStream::next_u64() {
    // splitmix64 (Steele, Lea, Flood 2014)
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double RandomStream::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::next_in(double lo, double hi) {
    return lo + (hi - lo) * next_unit();
}

double RandomStream::next_gaussian() {
    double u1 = next_unit();
    double u2 = next_unit();
    if (u1 <= 0.0) u1 = 0x1.0p-53;  // log(0) guard
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace pairjudge
