#pragma once

// Seeding and counter-based random draws.
//
// Training and Monte-Carlo inference both need random numbers that are a pure
// function of a seed. Stream RNGs (std::mt19937_64) are used where draws are
// consumed sequentially (shuffles, masks, initialization); dropout decisions
// use a stateless hash of (seed, layer, row, unit) so that two forward passes
// with the same seed see the same dropout pattern regardless of batching.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace mcgc {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit word.
inline constexpr double unit_interval(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double uniform01(Rng& rng) { return unit_interval(rng()); }

inline double standard_normal(Rng& rng) {
    // Box-Muller on our own uniforms keeps draws identical across standard libraries.
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925 * u2);
}

/// Uniform integer in [0, n) without modulo bias.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = rng();
    while (x >= limit) x = rng();
    return x % n;
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[uniform_index(rng, i)]);
    }
}

/// Derives `count` decorrelated seeds from a master seed.
inline std::vector<std::uint64_t> derive_seeds(std::uint64_t master, std::size_t count) {
    std::vector<std::uint64_t> seeds(count);
    std::uint64_t state = master;
    for (auto& s : seeds) {
        state = splitmix64(state);
        s = state;
    }
    return seeds;
}

/// FNV-1a over raw bytes.
inline std::uint64_t fnv1a64(std::span<const unsigned char> bytes,
                             std::uint64_t h = 0xCBF29CE484222325ULL) noexcept {
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s) {
    return fnv1a64(std::span(reinterpret_cast<const unsigned char*>(s.data()), s.size()));
}

inline std::string seeds_digest(std::span<const std::uint64_t> seeds) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (auto s : seeds) {
        unsigned char buf[8];
        for (int k = 0; k < 8; ++k) buf[k] = static_cast<unsigned char>(s >> (8 * k));
        h = fnv1a64(std::span<const unsigned char>(buf, 8), h);
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

}  // namespace mcgc
