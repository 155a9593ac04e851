#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace latdim {

using Coord = std::int64_t;
using LatticePoint = std::vector<Coord>;

/// Half-open axis-aligned cube prod_i [base_i, base_i + side).
struct Cube {
    LatticePoint base;
    Coord side = 1;

    Cube() = default;
    Cube(LatticePoint base, Coord side);

    std::size_t dim() const { return base.size(); }
    bool contains(std::span<const Coord> p) const;
    friend bool operator==(const Cube&, const Cube&) = default;
};

/// [-half_side, half_side)^d, the cubes used by the mass measure.
struct CenteredCube {
    Coord half_side = 1;

    explicit CenteredCube(Coord half_side);
    Cube as_cube(std::size_t dim) const;
};

/// Sorted, duplicate-free finite subset of Z^d. Immutable once built.
///
/// Points are stored row-major in one flat buffer so that sets with
/// hundreds of millions of points stay compact.
class LatticeSet {
public:
    LatticeSet() = default;
    explicit LatticeSet(std::size_t dim, std::string provenance = {});

    /// Takes `dim * n` coordinates, sorts lexicographically and removes duplicates.
    static LatticeSet from_flat(std::size_t dim, std::vector<Coord> coords, std::string provenance = {});
    static LatticeSet from_points(std::size_t dim, const std::vector<LatticePoint>& points,
                                  std::string provenance = {});
    /// Caller guarantees `coords` is already strictly increasing in lexicographic order.
    static LatticeSet from_sorted_unique(std::size_t dim, std::vector<Coord> coords, std::string provenance = {});

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
    bool empty() const { return coords_.empty(); }

    std::span<const Coord> point(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
    std::span<const Coord> coords() const { return coords_; }
    LatticePoint point_vec(std::size_t i) const;
    std::vector<LatticePoint> points() const;

    const std::string& provenance() const { return provenance_; }
    LatticeSet with_provenance(std::string provenance) const;

    bool contains(std::span<const Coord> p) const;

    /// Side of the smallest integer cube holding the set (max coordinate span + 1); 0 when empty.
    Coord cubic_diameter() const;
    /// Smallest integer cube holding the set.
    Cube bounding_cube() const;

    friend bool operator==(const LatticeSet& a, const LatticeSet& b)
    {
        return a.dim_ == b.dim_ && a.coords_ == b.coords_;
    }

private:
    std::size_t dim_ = 0;
    std::vector<Coord> coords_;
    std::string provenance_;
};

LatticeSet floor_set(std::size_t dim, std::span<const double> reals, std::string provenance = {});
LatticeSet floor_set(const std::vector<std::vector<double>>& reals, std::string provenance = {});

std::size_t count_in_cube(const LatticeSet& set, const Cube& cube);

/// {scale * a + shift : a in set}, with checked arithmetic.
LatticeSet affine_map(const LatticeSet& set, Coord scale, std::span<const Coord> shift);
Cube translate(const Cube& cube, std::span<const Coord> shift);

constexpr std::size_t default_product_cap = 100'000'000;

/// Cartesian product; throws ResourceError when |a| * |b| exceeds `cap`.
LatticeSet product(const LatticeSet& a, const LatticeSet& b, std::size_t cap = default_product_cap);

/// Set union of two sets of the same dimension.
LatticeSet set_union(const LatticeSet& a, const LatticeSet& b);

/// Points of `set` lying in `cube`, as a new set.
LatticeSet restrict_to(const LatticeSet& set, const Cube& cube);

} // namespace latdim
