#pragma once

#include <cstdint>

namespace exactrc {

/// SplitMix64. Substreams are keyed by (seed, index) so that a sample's
/// draws do not depend on which thread produces it.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) noexcept : state_(state) {}

    static SplitMix64 substream(std::uint64_t seed, std::uint64_t index) noexcept
    {
        SplitMix64 outer(seed);
        const std::uint64_t base = outer.next();
        SplitMix64 inner(base ^ (index * 0xD1B54A32D192ED03ULL));
        return SplitMix64(inner.next());
    }

    std::uint64_t next() noexcept
    {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

} // namespace exactrc
