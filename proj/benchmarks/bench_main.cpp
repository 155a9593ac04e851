#include <random>

#include <benchmark/benchmark.h>

#include "latdim/covering.hpp"
#include "latdim/dimension.hpp"
#include "latdim/generators.hpp"
#include "latdim/projection.hpp"

using namespace latdim;

static LatticeSet random_set(std::size_t dim, std::size_t n, Coord range)
{
    std::mt19937_64 gen(42);
    std::vector<Coord> flat(n * dim);
    for (auto& c : flat)
        c = static_cast<Coord>(gen() % static_cast<std::uint64_t>(range));
    return LatticeSet::from_flat(dim, std::move(flat));
}

static void BM_CountingProfile1d(benchmark::State& state)
{
    const auto set = integer_cantor(TransitionMatrix::restricted_digits(3, {0, 1}), static_cast<int>(state.range(0)));
    const auto grid = ScaleGrid::default_for(set);
    for (auto _ : state)
        benchmark::DoNotOptimize(counting_profile(set, grid));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(set.size() * grid.size()));
}
BENCHMARK(BM_CountingProfile1d)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_CountingProfile2d(benchmark::State& state)
{
    const auto set = random_set(2, static_cast<std::size_t>(state.range(0)), 1 << 16);
    const auto grid = ScaleGrid::dyadic(1, 16);
    for (auto _ : state)
        benchmark::DoNotOptimize(counting_profile(set, grid));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(set.size() * grid.size()));
}
BENCHMARK(BM_CountingProfile2d)->Arg(1 << 12)->Arg(1 << 16)->Unit(benchmark::kMillisecond);

static void BM_MassProfile(benchmark::State& state)
{
    const auto set = integer_cantor(TransitionMatrix::restricted_digits(3, {0, 1}), 16);
    const auto grid = ScaleGrid::default_for(set);
    for (auto _ : state)
        benchmark::DoNotOptimize(mass_profile(set, grid));
}
BENCHMARK(BM_MassProfile)->Unit(benchmark::kMicrosecond);

static void BM_OptimalCover1d(benchmark::State& state)
{
    const auto set = integer_cantor(TransitionMatrix::restricted_digits(3, {0, 2}), static_cast<int>(state.range(0)));
    const Cube cube = set.bounding_cube();
    for (auto _ : state)
        benchmark::DoNotOptimize(optimal_cover_1d(set, cube, 0.6, 0.0625));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(set.size()));
}
BENCHMARK(BM_OptimalCover1d)->Arg(8)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);

static void BM_GreedyCover2d(benchmark::State& state)
{
    const auto set = random_set(2, static_cast<std::size_t>(state.range(0)), 1 << 12);
    const Cube cube({0, 0}, 1 << 12);
    for (auto _ : state)
        benchmark::DoNotOptimize(greedy_cover_nd(set, cube, 1.5, 0.25));
}
BENCHMARK(BM_GreedyCover2d)->Arg(1 << 10)->Arg(1 << 14)->Unit(benchmark::kMillisecond);

static void BM_Sumset(benchmark::State& state)
{
    const auto squares = polynomial_image({Rational(0), Rational(0), Rational(1)}, 0, state.range(0));
    const auto cubes = polynomial_image({Rational(0), Rational(0), Rational(0), Rational(1)}, 0, state.range(0) / 8);
    for (auto _ : state)
        benchmark::DoNotOptimize(sumset({squares, cubes}, {1.0, 1.2345}));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(squares.size() * cubes.size()));
}
BENCHMARK(BM_Sumset)->Arg(1 << 10)->Arg(1 << 13)->Unit(benchmark::kMillisecond);

static void BM_AdditiveEnergy(benchmark::State& state)
{
    const auto set = random_set(2, static_cast<std::size_t>(state.range(0)), 1 << 20);
    const ProjectionMatrix m(1, 2, {0.618});
    for (auto _ : state)
        benchmark::DoNotOptimize(additive_energy(set, m));
}
BENCHMARK(BM_AdditiveEnergy)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
