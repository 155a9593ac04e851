#pragma once

#include <optional>
#include <vector>

#include "latdim/dimension.hpp"
#include "latdim/lattice.hpp"

namespace latdim {

/// A cover of A ∩ C by integer cubes of side in [1, floor(r ||C||)] and its cost
/// sum_i (||C_i|| / ||C||)^alpha.
struct CoverSolution {
    std::vector<Cube> cubes;
    double cost = 0.0;
    double alpha = 0.0;
    double ratio_cap = 1.0;
};

/// Exact minimum-cost cover of a 1-D set by integer intervals (dynamic programming over
/// the sorted points; each interval starts at the first uncovered point and ends on a point).
CoverSolution optimal_cover_1d(const LatticeSet& points, const Cube& cube, double alpha, double ratio);

/// Feasible cover from bottom-up merging of the dyadic partition of `cube`: a block
/// replaces its children whenever its own cost does not exceed theirs.
CoverSolution greedy_cover_nd(const LatticeSet& points, const Cube& cube, double alpha, double ratio);

/// optimal_cover_1d in dimension 1, greedy_cover_nd otherwise.
CoverSolution solve_cover(const LatticeSet& points, const Cube& cube, double alpha, double ratio);

struct CovdimOptions {
    std::vector<double> alphas;           ///< increasing
    std::vector<double> ratios{0.25, 0.0625, 0.015625};
    std::optional<std::size_t> window;    ///< top scales used for the decay fit; default largest half
    double tau = 0.05;                    ///< cost level reported as the threshold estimate
    unsigned threads = 1;
};

struct CovdimRow {
    double alpha;
    Coord side;
    double ratio;
    double cost;
};

struct CovdimResult {
    double estimate = 0.0;      ///< alpha at which the balance crosses zero
    std::optional<double> threshold_estimate; ///< smallest alpha with cost < tau at the largest scale
    bool saturated = false;     ///< the balance stayed positive over the whole alpha grid
    double ratio_used = 0.0;
    FitWindow window;
    std::vector<double> decay;  ///< per alpha: slope of log cost against log side over the window
    std::vector<double> ratio_decay; ///< per alpha: slope of log cost against log ratio cap, window average
    std::vector<double> balance;     ///< decay - ratio_decay; ideally D - alpha
    std::vector<CovdimRow> table;
};

/// Evaluates the cover cost at the counting-profile witness cubes of every scale and ratio.
/// Below the dimension the cost grows as the ratio cap shrinks (exponent alpha - D); above
/// it the cost decays with scale (exponent D - alpha). The estimate is where the difference
/// of the two exponents crosses zero.
CovdimResult covering_dimension_estimate(const LatticeSet& set, const ScaleGrid& grid, const CovdimOptions& opts);

/// alphas lo, lo+step, ..., hi (inclusive up to rounding), parsed from "lo:hi:step".
std::vector<double> parse_alpha_grid(std::string_view text);

} // namespace latdim
