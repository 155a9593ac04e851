#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "latdim/lattice.hpp"

namespace latdim {

/// Strictly increasing positive side lengths at which a set is probed.
class ScaleGrid {
public:
    explicit ScaleGrid(std::vector<Coord> sides);

    /// 2^lo, ..., 2^hi.
    static ScaleGrid dyadic(int lo, int hi);
    /// Accepts `pow2:a..b` or a comma-separated list of sides.
    static ScaleGrid parse(std::string_view text);
    /// Dyadic sides 2^1..2^J with 2^J <= cubic diameter of the set.
    static ScaleGrid default_for(const LatticeSet& set);

    const std::vector<Coord>& sides() const { return sides_; }
    std::size_t size() const { return sides_.size(); }

private:
    std::vector<Coord> sides_;
};

enum class ProfileKind { counting, mass };

struct ScaleEntry {
    Coord side = 0;         ///< grid value: cube side (counting) or half-side (mass)
    std::size_t count = 0;  ///< extremal point count at this scale
    Cube witness;           ///< a cube attaining `count`
};

struct ScaleProfile {
    ProfileKind kind = ProfileKind::counting;
    std::vector<ScaleEntry> entries;
};

/// Half-open index range [first, last) into a profile.
struct FitWindow {
    std::size_t first = 0;
    std::size_t last = 0;
};

/// The largest `top` scales, or the largest half when `top` is not given.
FitWindow top_window(std::size_t scale_count, std::optional<std::size_t> top = std::nullopt);

struct DimensionEstimate {
    double slope = 0.0;
    double intercept = 0.0;
    FitWindow window;
    std::vector<double> per_scale; ///< log N / log side for every profile entry (NaN where undefined)
    double residual = 0.0;         ///< sum of squared residuals of the log-log fit
};

struct WindowMax {
    std::size_t count = 0;
    Cube witness;
};

/// Maximum of |set ∩ C| over integer cubes of the given side. Only cubes whose lower
/// face touches a point coordinate on every axis are examined; any maximizer can be
/// slid onto such an anchor without losing points. O(n) for d = 1, O(n log n) for
/// d = 2 (sweep plus max segment tree), slab recursion for d >= 3.
WindowMax max_count_in_cube(const LatticeSet& set, Coord side);

ScaleProfile counting_profile(const LatticeSet& set, const ScaleGrid& grid, unsigned threads = 1);
/// Counts in the centered cubes [-l, l)^d for each half-side l of the grid.
ScaleProfile mass_profile(const LatticeSet& set, const ScaleGrid& grid);

DimensionEstimate fit_dimension(const ScaleProfile& profile, FitWindow window);
inline DimensionEstimate fit_dimension(const ScaleProfile& profile)
{
    return fit_dimension(profile, top_window(profile.entries.size()));
}

/// max over entries of count / ||witness||^alpha.
double measure_sup(const ScaleProfile& profile, double alpha);

struct SupResult {
    double value = 0.0;
    Cube cube;
};

/// sup over integer cubes with 1 <= side <= max_side of |set ∩ C| / side^alpha.
SupResult counting_sup(const LatticeSet& set, double alpha, Coord max_side);

struct RegularSubset {
    LatticeSet subset;   ///< F
    Cube cube;           ///< C_F, attains the supremum
    double sup_value = 0.0;
    double s_value = 0.0; ///< |E| / ||C_E||^alpha
};

/// Thins E ⊆ C_E down to a subset whose alpha-counting supremum lies in [2^d, 2^d + 1),
/// attained by a cube of side at least S^(1/d) / 6. Requires S >= 6^d.
RegularSubset extract_regular_subset(const LatticeSet& set, const Cube& container, double alpha);

} // namespace latdim
