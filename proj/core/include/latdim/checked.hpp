#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include <fmt/format.h>

#include "latdim/error.hpp"

namespace latdim {

inline std::int64_t checked_add(std::int64_t a, std::int64_t b, std::string_view what = "addition")
{
    std::int64_t out;
    if (__builtin_add_overflow(a, b, &out))
        throw RangeError(fmt::format("{} overflows int64: {} + {}", what, a, b));
    return out;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b, std::string_view what = "multiplication")
{
    std::int64_t out;
    if (__builtin_mul_overflow(a, b, &out))
        throw RangeError(fmt::format("{} overflows int64: {} * {}", what, a, b));
    return out;
}

/// Floor of a binary64 value into int64; throws on NaN, infinity, or out-of-range magnitude.
inline std::int64_t checked_floor(double v, std::string_view what = "value")
{
    if (!std::isfinite(v))
        throw RangeError(fmt::format("{} is not finite", what));
    const double f = std::floor(v);
    // 2^63 is exactly representable; anything at or above it does not fit.
    if (f < -9223372036854775808.0 || f >= 9223372036854775808.0)
        throw RangeError(fmt::format("{} = {} is outside the int64 range after flooring", what, v));
    return static_cast<std::int64_t>(f);
}

} // namespace latdim
