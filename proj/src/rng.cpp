#include "mixclust/rng.hpp"

namespace mixclust {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    const std::uint64_t s = SplitMix64::mix(stream + 0x632BE59BD9B4E019ULL);
    return SplitMix64::mix(seed ^ s) ^ SplitMix64::mix(s + 0xD1B54A32D192ED03ULL);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
    return derive_seed(derive_seed(seed, a), b);
}

}  // namespace mixclust
