#pragma once

#include <cmath>
#include <cstdint>

namespace fastdebias {

// SplitMix64 (Steele/Lea/Flood). Chosen over the <random> engines because its
// output sequence is fully specified here, so the same seed yields the same
// stream on every platform and standard-library implementation.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1), 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

    // Standard normal via Box-Muller, cosine branch only. Exactly two draws
    // per sample and no cached state, so the stream position is a pure
    // function of the number of samples requested.
    double gaussian() {
        const double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = static_cast<double>(next() >> 11) * 0x1.0p-53;        // [0, 1)
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    double rademacher() { return (next() >> 63) ? 1.0 : -1.0; }

    // Integer in [0, k) via Lemire's multiply-high reduction. Bias is below
    // k / 2^64, negligible for the index ranges used here.
    std::uint64_t below(std::uint64_t k) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * k) >> 64);
    }

private:
    std::uint64_t state_;
};

// Purpose tags for substream derivation. Every generator owns a tag, so a
// single per-trial seed can be handed to all of them without stream overlap,
// and parallel trial scheduling never changes any result.
enum class Stream : std::uint64_t {
    Matrix = 1,
    SignalSupport = 2,
    SignalValues = 3,
    Noise = 4,
    Trial = 5,
};

// Derived seed = chained SplitMix64 mixing of (master, tag, a, b).
// The exact formula is frozen by a regression test; changing it invalidates
// every golden fixture in the repo.
inline std::uint64_t derive_seed(std::uint64_t master, Stream tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
    SplitMix64 g0(master);
    std::uint64_t s = g0.next() ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(tag));
    SplitMix64 g1(s);
    s = g1.next() ^ (0xC2B2AE3D27D4EB4FULL * a);
    SplitMix64 g2(s);
    s = g2.next() ^ (0x165667B19E3779F9ULL * b);
    SplitMix64 g3(s);
    return g3.next();
}

}  // namespace fastdebias
