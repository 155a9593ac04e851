#pragma once

#include <cstdint>
#include <random>

namespace latdim {

/// Per-sample random stream keyed by (seed, sample index). Any sample can be
/// regenerated independently, so results do not depend on thread scheduling.
class SampleRng {
public:
    SampleRng(std::uint64_t seed, std::uint64_t index)
    {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
        engine_.seed(seq);
    }

    /// Uniform on [0, 1) with 53 random bits; avoids the library-specific
    /// behaviour of std::uniform_real_distribution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

inline constexpr std::uint64_t default_seed = 20240601;

} // namespace latdim
