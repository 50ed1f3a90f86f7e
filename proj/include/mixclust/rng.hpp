#pragma once

#include <cstdint>
#include <limits>

namespace mixclust {

/// SplitMix64 counter-based generator. Satisfies UniformRandomBitGenerator, so
/// it plugs into the <random> distributions.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// Seed of an independent stream identified by (seed, stream). Used so that
/// column n of a sample, or restart r of k-means, never depends on how many
/// draws other columns or restarts consumed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Two-level variant, e.g. (master seed, N index, trial index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept;

inline SplitMix64 make_stream(std::uint64_t seed, std::uint64_t stream) noexcept {
    return SplitMix64(derive_seed(seed, stream));
}

}  // namespace mixclust
