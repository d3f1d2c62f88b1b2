#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace mobility {

/// SplitMix64. Used everywhere instead of <random> engines/distributions so
/// that seeded results are identical across standard libraries and platforms.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// Stable sub-seed for item `index` of a seeded operation (per-tree, per-trip).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    SplitMix64 rng(master ^ (0x632be59bd9b4e019ULL + index * 0x9e3779b97f4a7c15ULL));
    return rng.next();
}

/// Uniform integer in [0, n) by rejection; n must be > 0.
inline std::uint64_t bounded(SplitMix64& rng, std::uint64_t n) {
    const std::uint64_t threshold = -n % n; // 2^64 mod n
    for (;;) {
        const std::uint64_t r = rng.next();
        if (r >= threshold) return r % n;
    }
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(SplitMix64& rng) {
    return static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
}

/// One standard normal draw (Box-Muller, cosine branch; the sine spare is
/// discarded to keep per-call determinism trivial).
inline double standard_normal(SplitMix64& rng) {
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Fisher-Yates shuffled index vector [0, n).
inline std::vector<std::size_t> shuffled_indices(std::size_t n, SplitMix64& rng) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(bounded(rng, i));
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

} // namespace mobility
