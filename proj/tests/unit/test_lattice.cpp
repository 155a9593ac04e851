#include <random>
#include <sstream>

#include <doctest.h>

#include "latdim/error.hpp"
#include "latdim/io.hpp"
#include "latdim/lattice.hpp"

using namespace latdim;

namespace {

LatticeSet set1(std::vector<Coord> xs) { return LatticeSet::from_flat(1, std::move(xs)); }

std::size_t brute_count(const LatticeSet& s, const Cube& c)
{
    std::size_t n = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        n += c.contains(s.point(i)) ? 1 : 0;
    return n;
}

} // namespace

TEST_CASE("floor_set")
{
    CHECK(floor_set({{1.7, -0.3}}) == LatticeSet::from_points(2, {{1, -1}}));
    CHECK(floor_set({{2.0, 3.0}}) == LatticeSet::from_points(2, {{2, 3}}));
    const auto s = floor_set({{0.5}, {0.9}});
    CHECK(s.size() == 1);
    CHECK(s.point_vec(0) == LatticePoint{0});
    CHECK_THROWS_AS(floor_set({{std::nan("")}}), RangeError);
    CHECK_THROWS_AS(floor_set({{1e300}}), RangeError);
    CHECK_THROWS_AS(floor_set({{std::numeric_limits<double>::infinity(), 0.0}}), RangeError);
}

TEST_CASE("floor_set is idempotent on integer input")
{
    const std::vector<std::vector<double>> pts{{3, -2}, {0, 0}, {-7, 11}};
    const auto a = floor_set(pts);
    std::vector<std::vector<double>> again;
    for (const auto& p : a.points())
        again.push_back({static_cast<double>(p[0]), static_cast<double>(p[1])});
    CHECK(floor_set(again) == a);
}

TEST_CASE("sets are sorted and deduplicated")
{
    const auto s = LatticeSet::from_points(2, {{1, 0}, {0, 5}, {1, 0}, {0, -1}});
    REQUIRE(s.size() == 3);
    CHECK(s.point_vec(0) == LatticePoint{0, -1});
    CHECK(s.point_vec(1) == LatticePoint{0, 5});
    CHECK(s.point_vec(2) == LatticePoint{1, 0});
    CHECK(s.contains(std::vector<Coord>{0, 5}));
    CHECK_FALSE(s.contains(std::vector<Coord>{5, 0}));
    CHECK(s.cubic_diameter() == 7);
    CHECK(s.bounding_cube() == Cube({0, -1}, 7));
}

TEST_CASE("count_in_cube")
{
    const auto s = set1({0, 1, 4, 9});
    CHECK(count_in_cube(s, Cube({0}, 10)) == 4);
    CHECK(count_in_cube(s, Cube({4}, 5)) == 1);
    CHECK(count_in_cube(LatticeSet(1), Cube({0}, 10)) == 0);
    CHECK_THROWS_AS(count_in_cube(s, Cube({0, 0}, 3)), ContractError);
    CHECK_THROWS_AS(Cube({0}, 0), ContractError);
}

TEST_CASE("count_in_cube matches enumeration in two and three dimensions")
{
    std::mt19937_64 gen(1);
    for (std::size_t d : {2u, 3u}) {
        std::vector<Coord> flat(300 * d);
        for (auto& c : flat)
            c = static_cast<Coord>(gen() % 30) - 10;
        const auto s = LatticeSet::from_flat(d, flat);
        for (int t = 0; t < 200; ++t) {
            LatticePoint base(d);
            for (auto& b : base)
                b = static_cast<Coord>(gen() % 40) - 20;
            const Cube c(base, 1 + static_cast<Coord>(gen() % 20));
            CHECK(count_in_cube(s, c) == brute_count(s, c));
        }
    }
}

TEST_CASE("affine_map")
{
    CHECK(affine_map(set1({0, 1, 2}), 3, std::vector<Coord>{1}) == set1({1, 4, 7}));
    const auto a = set1({-4, 8, 15});
    CHECK(affine_map(a, 1, std::vector<Coord>{0}) == a);
    CHECK(affine_map(LatticeSet::from_points(2, {{0, 0}, {1, 1}}), 2, std::vector<Coord>{-1, 0}) ==
          LatticeSet::from_points(2, {{-1, 0}, {1, 2}}));
    CHECK_THROWS_AS(affine_map(set1({std::numeric_limits<Coord>::max() / 2}), 3, std::vector<Coord>{0}), RangeError);
    CHECK_THROWS_AS(affine_map(a, 0, std::vector<Coord>{0}), ContractError);
}

TEST_CASE("translation and dilation equivariance of count_in_cube")
{
    std::mt19937_64 gen(2);
    std::vector<Coord> flat(400);
    for (auto& c : flat)
        c = static_cast<Coord>(gen() % 100);
    const auto a = LatticeSet::from_flat(2, flat);
    for (int t = 0; t < 100; ++t) {
        const Cube c({static_cast<Coord>(gen() % 100), static_cast<Coord>(gen() % 100)}, 1 + static_cast<Coord>(gen() % 50));
        const std::vector<Coord> z{static_cast<Coord>(gen() % 1000) - 500, static_cast<Coord>(gen() % 1000) - 500};
        CHECK(count_in_cube(affine_map(a, 1, z), translate(c, z)) == count_in_cube(a, c));
        const Coord k = 1 + static_cast<Coord>(gen() % 7);
        const Cube scaled({k * c.base[0], k * c.base[1]}, k * c.side);
        CHECK(count_in_cube(affine_map(a, k, std::vector<Coord>{0, 0}), scaled) == count_in_cube(a, c));
    }
}

TEST_CASE("product")
{
    CHECK(product(set1({0, 1}), set1({0, 2})) == LatticeSet::from_points(2, {{0, 0}, {0, 2}, {1, 0}, {1, 2}}));
    CHECK(product(set1({0, 1}), LatticeSet(1)).empty());
    CHECK(product(set1({0, 1}), LatticeSet(1)).dim() == 2);
    CHECK(product(set1({5}), set1({7})) == LatticeSet::from_points(2, {{5, 7}}));
    const auto a = set1({1, 2, 3, 10}), b = LatticeSet::from_points(2, {{0, 0}, {1, 5}, {2, 2}});
    CHECK(product(a, b).size() == a.size() * b.size());
    CHECK(product(a, b).dim() == 3);
    CHECK_THROWS_AS(product(a, b, 11), ResourceError);
}

TEST_CASE("union and restriction")
{
    CHECK(set_union(set1({1, 3}), set1({2, 3})) == set1({1, 2, 3}));
    CHECK(restrict_to(set1({0, 5, 10, 15}), Cube({5}, 10)) == set1({5, 10}));
    CHECK(CenteredCube(4).as_cube(2) == Cube({-4, -4}, 8));
}

TEST_CASE("JSONL round trip")
{
    const auto s = LatticeSet::from_points(2, {{3, 4}, {-1, 7}}, "test set");
    std::stringstream buf;
    io::write_set(buf, s);
    const std::string text = buf.str();
    CHECK(text.find("[-1,7]\n[3,4]\n") != std::string::npos);
    const auto back = io::read_set(buf);
    CHECK(back == s);
    CHECK(back.provenance() == "test set");
}

TEST_CASE("reader accepts plain text, headerless JSONL and comments")
{
    std::istringstream plain("# comment\n1 2\n\n3 4\n");
    CHECK(io::read_set(plain) == LatticeSet::from_points(2, {{1, 2}, {3, 4}}));
    std::istringstream jsonl("[5]\n[2]\n[5]\n");
    CHECK(io::read_set(jsonl) == set1({2, 5}));
    std::istringstream mixed("[1,2]\n[3]\n");
    CHECK_THROWS_AS(io::read_set(mixed), ContractError);
    std::istringstream bad("[1,x]\n");
    CHECK_THROWS_AS(io::read_set(bad), ContractError);
}
