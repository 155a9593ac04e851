#include "latdim/rational.hpp"

#include <cctype>

#include <fmt/format.h>

#include "latdim/error.hpp"

namespace latdim {

namespace {

BigInt parse_integer(std::string_view s, std::string_view whole)
{
    bool neg = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        neg = s.front() == '-';
        s.remove_prefix(1);
    }
    if (s.empty())
        throw ContractError(fmt::format("'{}' is not a rational number", whole));
    BigInt v = 0;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw ContractError(fmt::format("'{}' is not a rational number", whole));
        v = v * 10 + (c - '0');
    }
    return neg ? BigInt(-v) : v;
}

} // namespace

Rational parse_rational(std::string_view text)
{
    std::string_view s = text;
    while (!s.empty() && s.front() == ' ')
        s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ')
        s.remove_suffix(1);
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        BigInt num = parse_integer(s.substr(0, slash), text);
        BigInt den = parse_integer(s.substr(slash + 1), text);
        if (den == 0)
            throw ContractError(fmt::format("'{}' has a zero denominator", text));
        return Rational(num, den);
    }
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        std::string_view ip = s.substr(0, dot);
        std::string_view fp = s.substr(dot + 1);
        bool neg = !ip.empty() && ip.front() == '-';
        if (!ip.empty() && (ip.front() == '-' || ip.front() == '+'))
            ip.remove_prefix(1);
        if (ip.empty() && fp.empty())
            throw ContractError(fmt::format("'{}' is not a rational number", text));
        BigInt whole = ip.empty() ? BigInt(0) : parse_integer(ip, text);
        BigInt frac = fp.empty() ? BigInt(0) : parse_integer(fp, text);
        if (!fp.empty() && (fp.front() == '-' || fp.front() == '+'))
            throw ContractError(fmt::format("'{}' is not a rational number", text));
        BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(fp.size()));
        Rational r(whole * scale + frac, scale);
        return neg ? Rational(-r) : r;
    }
    return Rational(parse_integer(s, text));
}

std::string to_string(const Rational& r)
{
    if (denominator(r) == 1)
        return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

BigInt floor_div(const BigInt& a, const BigInt& b)
{
    BigInt q = a / b;
    if (a % b != 0 && a < 0)
        q -= 1;
    return q;
}

} // namespace latdim
