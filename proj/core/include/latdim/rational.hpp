#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace latdim {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "p", "p/q", or a finite decimal such as "-0.618" into an exact rational.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& r);

/// floor(a / b) for b > 0.
BigInt floor_div(const BigInt& a, const BigInt& b);

} // namespace latdim
