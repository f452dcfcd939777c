#pragma once

// Portable random helpers. The standard distributions are implementation
// defined, so everything that feeds a reported number goes through these.

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace relbias {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; derives independent stream seeds from one base seed.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound). bound must be > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t r = rng();
    while (r >= limit) {
        r = rng();
    }
    return r % bound;
}

/// Fisher-Yates.
template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_below(rng, i));
        using std::swap;
        swap(items[i - 1], items[j]);
    }
}

} // namespace relbias
