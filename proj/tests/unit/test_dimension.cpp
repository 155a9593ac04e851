#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include <doctest.h>

#include "latdim/dimension.hpp"
#include "latdim/error.hpp"
#include "latdim/generators.hpp"

using namespace latdim;

namespace {

LatticeSet set1(std::vector<Coord> xs) { return LatticeSet::from_flat(1, std::move(xs)); }

LatticeSet squares_to_100()
{
    std::vector<Coord> xs;
    for (Coord n = 0; n <= 10; ++n)
        xs.push_back(n * n);
    return set1(xs);
}

ScaleProfile make_profile(std::vector<std::pair<Coord, std::size_t>> rows)
{
    ScaleProfile p;
    for (auto [side, count] : rows)
        p.entries.push_back({side, count, Cube({0}, side)});
    return p;
}

// Max over all integer cubes whose base ranges over the bounding box shifted back by the side.
std::size_t brute_max(const LatticeSet& s, Coord side)
{
    const std::size_t d = s.dim();
    const Cube box = s.bounding_cube();
    std::size_t best = 0;
    LatticePoint base(d);
    std::function<void(std::size_t)> rec = [&](std::size_t c) {
        if (c == d) {
            best = std::max(best, count_in_cube(s, Cube(base, side)));
            return;
        }
        for (Coord b = box.base[c] - side + 1; b < box.base[c] + box.side; ++b) {
            base[c] = b;
            rec(c + 1);
        }
    };
    rec(0);
    return best;
}

LatticeSet random_set(std::mt19937_64& gen, std::size_t d, std::size_t n, Coord range)
{
    std::vector<Coord> flat(n * d);
    for (auto& c : flat)
        c = static_cast<Coord>(gen() % static_cast<std::uint64_t>(range));
    return LatticeSet::from_flat(d, flat);
}

} // namespace

TEST_CASE("scale grids")
{
    CHECK(ScaleGrid::parse("pow2:1..4").sides() == std::vector<Coord>{2, 4, 8, 16});
    CHECK(ScaleGrid::parse("3,10,100").sides() == std::vector<Coord>{3, 10, 100});
    CHECK(ScaleGrid::dyadic(0, 2).sides() == std::vector<Coord>{1, 2, 4});
    CHECK(ScaleGrid::default_for(set1({0, 1000})).sides().back() == 512);
    CHECK_THROWS_AS(ScaleGrid(std::vector<Coord>{4, 2}), ContractError);
    CHECK_THROWS_AS(ScaleGrid(std::vector<Coord>{}), ContractError);
    CHECK_THROWS_AS(ScaleGrid::parse("pow2:5..1"), ContractError);
    CHECK_THROWS_AS(ScaleGrid::parse("1,x"), ContractError);
}

TEST_CASE("counting_profile examples")
{
    const auto sq = squares_to_100();
    const auto p = counting_profile(sq, ScaleGrid(std::vector<Coord>{1, 10, 101}));
    CHECK(p.kind == ProfileKind::counting);
    CHECK(p.entries[0].count == 1);
    CHECK(p.entries[1].count == 4);
    CHECK(p.entries[1].witness == Cube({0}, 10));
    CHECK(p.entries[2].count == 11);
    CHECK_THROWS_AS(counting_profile(LatticeSet(1), ScaleGrid(std::vector<Coord>{1})), ContractError);
}

TEST_CASE("mass_profile examples")
{
    const auto sq = squares_to_100();
    const auto p = mass_profile(sq, ScaleGrid(std::vector<Coord>{10, 50}));
    CHECK(p.entries[0].count == 4);
    CHECK(p.entries[1].count == 8);
    CHECK(p.entries[1].witness == Cube({-50}, 100));
    CHECK(mass_profile(set1({-3, 5}), ScaleGrid(std::vector<Coord>{4})).entries[0].count == 1);
    CHECK_THROWS_AS(mass_profile(LatticeSet(1), ScaleGrid(std::vector<Coord>{1})), ContractError);
}

TEST_CASE("anchored maximization equals brute force")
{
    std::mt19937_64 gen(3);
    for (std::size_t d = 1; d <= 4; ++d)
        for (int t = 0; t < 40; ++t) {
            const auto s = random_set(gen, d, 1 + gen() % 20, d >= 3 ? 9 : 51);
            for (Coord side = 1; side <= (d >= 3 ? 10 : 52); side += (d >= 3 ? 1 : static_cast<Coord>(d))) {
                const auto m = max_count_in_cube(s, side);
                CHECK(m.count == brute_max(s, side));
                CHECK(count_in_cube(s, m.witness) == m.count);
                CHECK(m.witness.side == side);
            }
        }
}

TEST_CASE("two-dimensional maximization on larger random sets")
{
    std::mt19937_64 gen(4);
    for (int t = 0; t < 5; ++t) {
        const auto s = random_set(gen, 2, 400, 60);
        for (Coord side : {1, 3, 7, 16, 33}) {
            const auto m = max_count_in_cube(s, side);
            CHECK(m.count == brute_max(s, side));
        }
    }
}

TEST_CASE("profile invariants")
{
    std::mt19937_64 gen(5);
    const ScaleGrid grid = ScaleGrid::dyadic(0, 8);
    for (std::size_t d = 1; d <= 3; ++d) {
        const auto a = random_set(gen, d, 300, 200);
        const auto b = random_set(gen, d, 150, 300);
        const auto pa = counting_profile(a, grid);
        const auto pt = counting_profile(affine_map(a, 1, std::vector<Coord>(d, -77)), grid);
        const auto pd = counting_profile(affine_map(a, 3, std::vector<Coord>(d, 0)), ScaleGrid::parse("3,6,12,24,48,96,192,384,768"));
        const auto pb = counting_profile(b, grid);
        const auto pu = counting_profile(set_union(a, b), grid);
        const auto pm = mass_profile(a, grid);
        const auto pa2 = counting_profile(a, ScaleGrid::dyadic(1, 9));
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK(pt.entries[i].count == pa.entries[i].count);
            CHECK(pd.entries[i].count == pa.entries[i].count);
            CHECK(pu.entries[i].count <= pa.entries[i].count + pb.entries[i].count);
            CHECK(pm.entries[i].count <= pa2.entries[i].count);
            if (i > 0)
                CHECK(pa.entries[i].count >= pa.entries[i - 1].count);
        }
    }
}

TEST_CASE("parallel profile equals sequential profile")
{
    std::mt19937_64 gen(6);
    const auto s = random_set(gen, 2, 2000, 5000);
    const auto grid = ScaleGrid::dyadic(0, 12);
    const auto p1 = counting_profile(s, grid, 1);
    const auto p4 = counting_profile(s, grid, 4);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(p1.entries[i].count == p4.entries[i].count);
        CHECK(p1.entries[i].witness == p4.entries[i].witness);
    }
}

TEST_CASE("fit_dimension")
{
    auto est = fit_dimension(make_profile({{2, 2}, {4, 4}, {8, 8}}), FitWindow{0, 3});
    CHECK(est.slope == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(est.residual == doctest::Approx(0.0).epsilon(1e-12));
    est = fit_dimension(make_profile({{4, 2}, {16, 4}, {64, 8}}), FitWindow{0, 3});
    CHECK(est.slope == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(est.per_scale[2] == doctest::Approx(0.5).epsilon(1e-12));
    est = fit_dimension(make_profile({{1, 1}, {4, 2}}), FitWindow{0, 2});
    CHECK(std::isnan(est.per_scale[0]));
    CHECK(est.slope == doctest::Approx(0.5));
    CHECK_THROWS_AS(fit_dimension(make_profile({{2, 2}, {4, 4}}), FitWindow{1, 2}), ContractError);
    CHECK_THROWS_AS(fit_dimension(make_profile({{2, 2}, {4, 4}}), FitWindow{0, 3}), ContractError);

    std::vector<Coord> sq;
    for (Coord n = 0; n <= 1000; ++n)
        sq.push_back(n * n);
    const auto s = set1(sq);
    const double slope = fit_dimension(counting_profile(s, ScaleGrid::default_for(s))).slope;
    CHECK(slope >= 0.45);
    CHECK(slope <= 0.55);
}

TEST_CASE("top_window")
{
    CHECK(top_window(10).first == 5);
    CHECK(top_window(10).last == 10);
    CHECK(top_window(11).first == 5);
    CHECK(top_window(10, 3).first == 7);
    CHECK(top_window(4, 5).first == 0);
}

TEST_CASE("measure_sup")
{
    const auto p = make_profile({{10, 4}, {100, 11}});
    CHECK(measure_sup(p, 0) == 11);
    CHECK(measure_sup(p, 1) == doctest::Approx(0.4));
    CHECK(measure_sup(p, 0.5) == doctest::Approx(4 / std::sqrt(10.0)).epsilon(1e-12));
    double prev = measure_sup(p, 0);
    for (int i = 1; i <= 30; ++i) {
        const double cur = measure_sup(p, 0.1 * i);
        CHECK(cur <= prev);
        prev = cur;
    }
}

TEST_CASE("mass profile uses full witness side in measure_sup")
{
    const auto p = mass_profile(squares_to_100(), ScaleGrid(std::vector<Coord>{5}));
    CHECK(measure_sup(p, 1) == doctest::Approx(3.0 / 10.0));
}

TEST_CASE("counting_sup matches brute force")
{
    std::mt19937_64 gen(7);
    for (std::size_t d = 1; d <= 2; ++d)
        for (int t = 0; t < 20; ++t) {
            const auto s = random_set(gen, d, 1 + gen() % 15, 30);
            const double alpha = 0.2 + 0.1 * static_cast<double>(t % 8);
            double best = 0;
            for (Coord side = 1; side <= 30; ++side)
                best = std::max(best, static_cast<double>(brute_max(s, side)) / std::pow(static_cast<double>(side), alpha));
            const auto r = counting_sup(s, alpha, 30);
            CHECK(r.value == doctest::Approx(best).epsilon(1e-12));
            CHECK(static_cast<double>(count_in_cube(s, r.cube)) / std::pow(static_cast<double>(r.cube.side), alpha) ==
                  doctest::Approx(best).epsilon(1e-12));
        }
}

TEST_CASE("extract_regular_subset examples")
{
    auto check_post = [](const LatticeSet& e, const Cube& ce, double alpha) {
        const auto r = extract_regular_subset(e, ce, alpha);
        double sup = 0;
        for (Coord side = 1; side <= ce.side; ++side)
            sup = std::max(sup, static_cast<double>(max_count_in_cube(r.subset, side).count) /
                                    std::pow(static_cast<double>(side), alpha));
        CHECK(sup >= 2);
        CHECK(sup < 3);
        CHECK(r.sup_value == doctest::Approx(sup).epsilon(1e-12));
        CHECK(static_cast<double>(r.cube.side) >= r.s_value / 6);
        for (std::size_t i = 0; i < r.subset.size(); ++i) {
            CHECK(e.contains(r.subset.point(i)));
            CHECK(r.cube.contains(r.subset.point(i)));
        }
        return r;
    };
    std::vector<Coord> xs(36);
    std::iota(xs.begin(), xs.end(), 0);
    auto r = check_post(set1(xs), Cube({0}, 36), 0.5);
    CHECK(r.s_value == doctest::Approx(6.0));
    CHECK(r.cube.side >= 1);

    xs.resize(144);
    std::iota(xs.begin(), xs.end(), 0);
    r = check_post(set1(xs), Cube({0}, 144), 0.5);
    CHECK(r.s_value == doctest::Approx(12.0));
    CHECK(r.cube.side >= 2);

    CHECK_THROWS_AS(extract_regular_subset(set1({0}), Cube({0}, 36), 0.5), ContractError);
    CHECK_THROWS_AS(extract_regular_subset(set1(xs), Cube({0}, 144), 0.0), ContractError);
    CHECK_THROWS_AS(extract_regular_subset(set1({0, 200}), Cube({0}, 144), 0.5), ContractError);
}

TEST_CASE("extract_regular_subset in two dimensions")
{
    std::vector<Coord> flat;
    for (Coord x = 0; x < 40; ++x)
        for (Coord y = 0; y < 40; ++y)
            flat.insert(flat.end(), {x, y});
    const auto e = LatticeSet::from_flat(2, flat);
    const auto r = extract_regular_subset(e, Cube({0, 0}, 40), 0.5);
    CHECK(r.sup_value >= 4);
    CHECK(r.sup_value < 5);
    CHECK(static_cast<double>(r.cube.side) >= std::sqrt(r.s_value) / 6);
    CHECK(counting_sup(r.subset, 0.5, 40).value == doctest::Approx(r.sup_value));
}
