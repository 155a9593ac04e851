#include <cmath>
#include <set>

#include <doctest.h>

#include "latdim/error.hpp"
#include "latdim/generators.hpp"

using namespace latdim;

namespace {

LatticeSet set1(std::vector<Coord> xs) { return LatticeSet::from_flat(1, std::move(xs)); }

std::vector<Rational> coeffs(std::initializer_list<const char*> cs)
{
    std::vector<Rational> out;
    for (const char* c : cs)
        out.push_back(parse_rational(c));
    return out;
}

// Every digit string of length <= depth admitted by the matrix, read as a base-b number.
std::set<Coord> cantor_oracle(const TransitionMatrix& tm, int depth)
{
    std::set<Coord> out;
    for (int s : tm.start_digits())
        if (s == 0)
            out.insert(0);
    const int b = tm.base();
    Coord total = 1;
    for (int i = 0; i < depth; ++i)
        total *= b;
    for (Coord v = 0; v < total; ++v) {
        std::vector<int> digits; // least significant first
        for (Coord x = v; x > 0; x /= b)
            digits.push_back(static_cast<int>(x % b));
        if (digits.empty())
            continue;
        bool ok = false;
        for (int s : tm.start_digits())
            ok = ok || s == digits[0];
        for (std::size_t i = 0; ok && i + 1 < digits.size(); ++i)
            ok = tm.allowed(digits[i], digits[i + 1]);
        if (ok)
            out.insert(v);
    }
    return out;
}

} // namespace

TEST_CASE("rational parsing")
{
    CHECK(parse_rational("3/2") == Rational(3, 2));
    CHECK(parse_rational("-0.25") == Rational(-1, 4));
    CHECK(parse_rational("7") == Rational(7));
    CHECK(to_string(Rational(6, 4)) == "3/2");
    CHECK_THROWS_AS(parse_rational("1/0"), ContractError);
    CHECK_THROWS_AS(parse_rational("abc"), ContractError);
    CHECK(floor_div(BigInt(-7), BigInt(2)) == BigInt(-4));
    CHECK(floor_div(BigInt(7), BigInt(2)) == BigInt(3));
}

TEST_CASE("polynomial_image")
{
    CHECK(polynomial_image(coeffs({"0", "0", "1"}), 0, 4) == set1({0, 1, 4, 9}));
    CHECK(polynomial_image(coeffs({"0", "-1", "1"}), 0, 4) == set1({0, 2, 6}));
    CHECK(polynomial_image(coeffs({"0", "1/2"}), 0, 4) == set1({0, 1}));
    CHECK(polynomial_image(coeffs({"0", "0", "0", "1"}), -2, 3) == set1({-8, -1, 0, 1, 8}));
    CHECK_THROWS_AS(polynomial_image(coeffs({"0", "0", "0", "0", "1"}), 0, 100000), RangeError);
}

TEST_CASE("power_sequence")
{
    CHECK(power_sequence(Rational(2), 4) == set1({1, 4, 9}));
    CHECK(power_sequence(Rational(1, 2), 11) == set1({1, 2, 3}));
    CHECK(power_sequence(Rational(1), 5) == set1({1, 2, 3, 4}));
    // floor(n^(3/2)) against an exact integer check.
    const auto s = power_sequence(Rational(3, 2), 2000);
    for (Coord n = 1; n < 2000; ++n) {
        Coord f = static_cast<Coord>(std::floor(std::pow(static_cast<double>(n), 1.5)));
        while (f * f > n * n * n)
            --f;
        while ((f + 1) * (f + 1) <= n * n * n)
            ++f;
        CHECK(s.contains(std::vector<Coord>{f}));
    }
    CHECK_THROWS_AS(power_sequence(Rational(0), 5), ContractError);
}

TEST_CASE("geometric")
{
    CHECK(geometric(Rational(2), 100) == set1({2, 4, 8, 16, 32, 64}));
    CHECK(geometric(Rational(3), 10) == set1({3, 9}));
    CHECK(geometric(Rational(3, 2), 5) == set1({1, 2, 3}));
    CHECK_THROWS_AS(geometric(Rational(1), 10), ContractError);
}

TEST_CASE("primes")
{
    CHECK(primes(10) == set1({2, 3, 5, 7}));
    CHECK(primes(2).empty());
    CHECK(primes(30) == set1({2, 3, 5, 7, 11, 13, 17, 19, 23, 29}));
    CHECK(primes(1'000'000).size() == 78498);
}

TEST_CASE("integer_cantor")
{
    const auto tm = TransitionMatrix::restricted_digits(3, {0, 1});
    CHECK(integer_cantor(tm, 2) == set1({0, 1, 3, 4}));
    CHECK(integer_cantor(tm, 3) == set1({0, 1, 3, 4, 9, 10, 12, 13}));
    const TransitionMatrix fib(2, {1, 1, 1, 0});
    CHECK(integer_cantor(fib, 3) == set1({0, 1, 2, 4, 5}));
    CHECK(integer_cantor(tm, 12).size() == 4096);
}

TEST_CASE("integer_cantor matches digit-string enumeration")
{
    const std::vector<TransitionMatrix> cases{
        TransitionMatrix(2, {1, 1, 1, 0}),
        TransitionMatrix(3, {1, 0, 1, 0, 1, 1, 1, 1, 0}, {0, 2}),
        TransitionMatrix::restricted_digits(4, {1, 3}),
        TransitionMatrix(3, {0, 1, 0, 0, 0, 1, 1, 0, 0}, {1}),
    };
    for (const auto& tm : cases) {
        const auto s = integer_cantor(tm, 7);
        const auto oracle = cantor_oracle(tm, 7);
        REQUIRE(s.size() == oracle.size());
        std::size_t i = 0;
        for (Coord v : oracle)
            CHECK(s.point(i++)[0] == v);
    }
}

TEST_CASE("transition matrix validation")
{
    CHECK_THROWS_AS(TransitionMatrix(2, {1, 1, 1}), ContractError);
    CHECK_THROWS_AS(TransitionMatrix(2, {1, 2, 1, 0}), ContractError);
    CHECK_THROWS_AS(TransitionMatrix(2, {0, 1, 0, 0}), ContractError); // no cycle
    CHECK_THROWS_AS(TransitionMatrix(2, {1, 1, 1, 0}, {2}), ContractError);
    CHECK_THROWS_AS(TransitionMatrix::restricted_digits(3, {0, 3}), ContractError);
    CHECK(TransitionMatrix(2, {1, 1, 1, 0}).has_cycle());
}

TEST_CASE("generalized_ip")
{
    const auto spec = IpSpec::pow2_family(2);
    CHECK(generalized_ip(spec, 1) == set1({0, 2}));
    CHECK(generalized_ip(spec, 2) == set1({0, 2, 16, 18, 32, 34, 48, 50}));
    CHECK(generalized_ip(IpSpec{{2}, {1}}, 1) == set1({0, 1}));
    CHECK(generalized_ip(IpSpec::pow2_family(4), 4).size() == 2u * 4 * 8 * 16);
    CHECK_THROWS_AS(generalized_ip(IpSpec{{2, 2}, {1, 1}}, 2), ContractError);
    CHECK_THROWS_AS(generalized_ip(IpSpec{{2}, {1}}, 2), ContractError);
}

TEST_CASE("perron_frobenius")
{
    CHECK(perron_frobenius(TransitionMatrix(2, {1, 1, 1, 1})) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(perron_frobenius(TransitionMatrix(2, {1, 1, 1, 0})) == doctest::Approx((1 + std::sqrt(5.0)) / 2).epsilon(1e-10));
    CHECK(perron_frobenius(TransitionMatrix(1, {1})) == doctest::Approx(1.0).epsilon(1e-12));
    // Periodic matrix: the shift by the identity keeps power iteration convergent.
    CHECK(perron_frobenius(TransitionMatrix(2, {0, 1, 1, 0})) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("perron_frobenius agrees with Cantor set growth")
{
    const TransitionMatrix tm(3, {1, 1, 0, 1, 0, 1, 1, 1, 1});
    const double lambda = perron_frobenius(tm);
    const double ratio = static_cast<double>(integer_cantor(tm, 14).size()) / static_cast<double>(integer_cantor(tm, 13).size());
    CHECK(ratio == doctest::Approx(lambda).epsilon(1e-3));
}

TEST_CASE("expected_dimension")
{
    CHECK(expected_dimension({PolynomialSpec{coeffs({"1", "0", "1"}), 0, 10}}) == doctest::Approx(0.5));
    CHECK(expected_dimension({CantorSpec{TransitionMatrix::restricted_digits(3, {0, 1}), 5}}) ==
          doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-10));
    CHECK(expected_dimension({IpGenSpec{IpSpec::pow2_family(7), 7}}) == doctest::Approx(0.5).epsilon(0.1));
    CHECK(expected_dimension({PowerSpec{Rational(3, 2), 10}}) == doctest::Approx(2.0 / 3.0));
    CHECK(expected_dimension({PowerSpec{Rational(1, 2), 10}}) == doctest::Approx(1.0));
    CHECK(expected_dimension({GeometricSpec{Rational(2), 10}}) == 0.0);
    CHECK(expected_dimension({PrimesSpec{100}}) == 1.0);
    CHECK(expected_dimension({ProductSpec{{{PrimesSpec{10}}, {PolynomialSpec{coeffs({"0", "0", "0", "1"}), 0, 5}}}}}) ==
          doctest::Approx(4.0 / 3.0));
    CHECK_THROWS_AS(expected_dimension({FileSpec{"x.jsonl"}}), ContractError);
}

TEST_CASE("generator specs round-trip through JSON")
{
    const std::vector<GeneratorSpec> specs{
        {PolynomialSpec{coeffs({"1/3", "0", "2"}), -5, 50}},
        {PowerSpec{Rational(3, 2), 100}},
        {GeometricSpec{Rational(5, 2), 1000}},
        {PrimesSpec{500}},
        {IntervalSpec{-3, 9}},
        {CantorSpec{TransitionMatrix(2, {1, 1, 1, 0}, {0}), 6}},
        {IpGenSpec{IpSpec::pow2_family(3), 3}},
        {ProductSpec{{{PrimesSpec{20}}, {IntervalSpec{0, 3}}}}},
    };
    for (const auto& s : specs) {
        const auto j = to_json(s);
        const auto back = generator_spec_from_json(j);
        CHECK(to_json(back) == j);
        CHECK(materialize(back) == materialize(s));
    }
    CHECK_THROWS_AS(generator_spec_from_json({{"family", "mystery"}}), ContractError);
    CHECK(materialize({IntervalSpec{2, 5}}) == set1({2, 3, 4}));
}
