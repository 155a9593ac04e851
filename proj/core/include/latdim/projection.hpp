#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "latdim/lattice.hpp"

namespace latdim {

/// k x (d - k) matrix M of the oblique projection P_M onto R^k x {0}^(d-k):
/// a point (x, y) with x in Z^k, y in Z^(d-k) maps to x + M y.
class ProjectionMatrix {
public:
    /// `entries` row-major, k rows of d - k columns.
    ProjectionMatrix(std::size_t k, std::size_t d, std::vector<double> entries);
    /// Parses "a,b;c,d" (rows separated by ';'); the row count gives k, d = k + columns.
    static ProjectionMatrix parse(std::string_view text);

    std::size_t k() const { return k_; }
    std::size_t d() const { return d_; }
    std::size_t cols() const { return d_ - k_; }
    double at(std::size_t row, std::size_t col) const { return entries_[row * cols() + col]; }
    const std::vector<double>& entries() const { return entries_; }

    /// x_r + sum_c M[r][c] y_c in binary64, summing the M y terms left to right.
    double apply_row(std::span<const Coord> point, std::size_t row) const;

private:
    std::size_t k_;
    std::size_t d_;
    std::vector<double> entries_;
};

/// Values within 2^-40 of an integer, excluding exact integers, whose floor binary64
/// rounding could flip.
inline constexpr double boundary_tie_band = 0x1.0p-40;

struct Projected {
    LatticeSet set;
    std::size_t boundary_ties = 0;
};

Projected project_with_diagnostics(const LatticeSet& set, const ProjectionMatrix& m);
LatticeSet project(const LatticeSet& set, const ProjectionMatrix& m);

constexpr std::size_t default_sumset_cap = 100'000'000;

/// {floor(sum_i lambda_i a_i) : a_i in A_i} for 1-D sets, evaluated as
/// lambda_0 a_0 + (lambda_1 a_1 + ... ) so that it agrees bit-for-bit with projecting
/// the product set when lambda_0 = 1. `cap` bounds the number of sums enumerated.
/// Exact whenever every |lambda_i a_i| <= 2^52 and the partial sums stay representable.
LatticeSet sumset(const std::vector<LatticeSet>& sets, const std::vector<double>& lambdas,
                  std::size_t cap = default_sumset_cap);

struct EnergyReport {
    std::size_t image_size = 0;
    std::uint64_t energy = 0;                ///< S_E(M) = sum_y R(y)^2
    std::vector<std::uint64_t> rep_counts;   ///< R(y) over the image, descending
    std::size_t set_size = 0;
};

EnergyReport additive_energy(const LatticeSet& set, const ProjectionMatrix& m);

/// image_size * S >= |E|^2, evaluated in 128-bit integer arithmetic.
bool cauchy_schwarz_holds(const EnergyReport& r);

struct EntryBox {
    double lo = -2.0;
    double hi = 2.0;
};

struct TransversalityEstimate {
    double fraction = 0.0;
    double std_error = 0.0;
    std::size_t hits = 0;
    std::size_t samples = 0;
};

/// Monte Carlo measure of {M in box : floor(P_M z) = floor(P_M z')} for k x (d-k)
/// matrices with i.i.d. uniform entries. Sample i draws from SampleRng(seed, i).
TransversalityEstimate empirical_transversality(std::span<const Coord> z, std::span<const Coord> z2, std::size_t k,
                                                EntryBox box, std::size_t samples, std::uint64_t seed,
                                                unsigned threads = 1);

/// Draws the matrix for sample `index` of a run keyed by `seed`.
ProjectionMatrix sample_matrix(std::size_t k, std::size_t d, EntryBox box, std::uint64_t seed, std::uint64_t index);

} // namespace latdim
