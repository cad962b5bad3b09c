#pragma once

#include <cmath>
#include <cstdint>

namespace magres {

/// Seeded counter-style PRNG built on the splitmix64 mixer.
///
/// Every draw advances a position counter, so (seed, position) fully
/// identifies a point in the stream and replays are bit-exact. Substreams
/// derive statistically independent generators from the same seed; each
/// parallel strand must own its own RngState.
class RngState {
public:
    explicit RngState(std::uint64_t seed) noexcept : seed_(seed), state_(seed), position_(0) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t position() const noexcept { return position_; }

    std::uint64_t next_u64() noexcept {
        ++position_;
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform01() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller; consumes exactly two draws.
    double gaussian() noexcept {
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log1p(-u1));  // 1-u1 in (0,1], log stays finite
        return r * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    /// Uniform integer in [0, n). Modulo bias is ~n/2^64, negligible at our n.
    std::uint64_t below(std::uint64_t n) noexcept { return next_u64() % n; }

    /// Derive an independent generator for a named stream of this seed.
    RngState substream(std::uint64_t stream) const noexcept {
        return RngState(mix(seed_ + 0x9E3779B97F4A7C15ull * (stream + 1)));
    }

private:
    static std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t state_;
    std::uint64_t position_;
};

}  // namespace magres
