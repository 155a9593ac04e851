#include "latdim/lattice.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "latdim/checked.hpp"
#include "latdim/error.hpp"

namespace latdim {

Cube::Cube(LatticePoint base_, Coord side_)
    : base(std::move(base_)), side(side_)
{
    if (base.empty())
        throw ContractError("cube dimension must be at least 1");
    if (side < 1)
        throw ContractError(fmt::format("cube side must be positive, got {}", side));
    for (Coord b : base)
        checked_add(b, side, "cube upper corner");
}

bool Cube::contains(std::span<const Coord> p) const
{
    if (p.size() != base.size())
        throw ContractError(fmt::format("point of dimension {} tested against cube of dimension {}", p.size(), base.size()));
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] < base[i] || p[i] - base[i] >= side)
            return false;
    return true;
}

CenteredCube::CenteredCube(Coord half_side_)
    : half_side(half_side_)
{
    if (half_side < 1)
        throw ContractError(fmt::format("centered cube half-side must be positive, got {}", half_side));
    checked_mul(half_side, 2, "centered cube side");
}

Cube CenteredCube::as_cube(std::size_t dim) const
{
    return Cube(LatticePoint(dim, -half_side), 2 * half_side);
}

LatticeSet::LatticeSet(std::size_t dim, std::string provenance)
    : dim_(dim), provenance_(std::move(provenance))
{
    if (dim_ == 0)
        throw ContractError("lattice set dimension must be at least 1");
}

LatticeSet LatticeSet::from_sorted_unique(std::size_t dim, std::vector<Coord> coords, std::string provenance)
{
    LatticeSet out(dim, std::move(provenance));
    if (coords.size() % dim != 0)
        throw ContractError(fmt::format("{} coordinates do not split into points of dimension {}", coords.size(), dim));
    out.coords_ = std::move(coords);
    return out;
}

LatticeSet LatticeSet::from_flat(std::size_t dim, std::vector<Coord> coords, std::string provenance)
{
    LatticeSet out(dim, std::move(provenance));
    if (coords.size() % dim != 0)
        throw ContractError(fmt::format("{} coordinates do not split into points of dimension {}", coords.size(), dim));
    if (dim == 1) {
        std::sort(coords.begin(), coords.end());
        coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
        out.coords_ = std::move(coords);
        return out;
    }
    const std::size_t n = coords.size() / dim;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto row = [&](std::size_t i) { return std::span<const Coord>(coords.data() + i * dim, dim); };
    auto less = [&](std::size_t a, std::size_t b) {
        auto ra = row(a), rb = row(b);
        return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
    };
    std::sort(order.begin(), order.end(), less);
    std::vector<Coord> sorted;
    sorted.reserve(coords.size());
    for (std::size_t k = 0; k < n; ++k) {
        auto r = row(order[k]);
        if (k > 0 && std::equal(r.begin(), r.end(), sorted.end() - static_cast<std::ptrdiff_t>(dim)))
            continue;
        sorted.insert(sorted.end(), r.begin(), r.end());
    }
    out.coords_ = std::move(sorted);
    return out;
}

LatticeSet LatticeSet::from_points(std::size_t dim, const std::vector<LatticePoint>& points, std::string provenance)
{
    std::vector<Coord> flat;
    flat.reserve(points.size() * dim);
    for (const auto& p : points) {
        if (p.size() != dim)
            throw ContractError(fmt::format("point [{}] has dimension {}, expected {}", fmt::join(p, ","), p.size(), dim));
        flat.insert(flat.end(), p.begin(), p.end());
    }
    return from_flat(dim, std::move(flat), std::move(provenance));
}

LatticePoint LatticeSet::point_vec(std::size_t i) const
{
    auto p = point(i);
    return {p.begin(), p.end()};
}

std::vector<LatticePoint> LatticeSet::points() const
{
    std::vector<LatticePoint> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i)
        out.push_back(point_vec(i));
    return out;
}

LatticeSet LatticeSet::with_provenance(std::string provenance) const
{
    LatticeSet out = *this;
    out.provenance_ = std::move(provenance);
    return out;
}

bool LatticeSet::contains(std::span<const Coord> p) const
{
    if (p.size() != dim_)
        return false;
    std::size_t lo = 0, hi = size();
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        auto q = point(mid);
        if (std::lexicographical_compare(q.begin(), q.end(), p.begin(), p.end()))
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo < size() && std::ranges::equal(point(lo), p);
}

Cube LatticeSet::bounding_cube() const
{
    if (empty())
        throw ContractError("bounding cube of an empty set");
    LatticePoint lo(point(0).begin(), point(0).end());
    LatticePoint hi = lo;
    for (std::size_t i = 1; i < size(); ++i) {
        auto p = point(i);
        for (std::size_t c = 0; c < dim_; ++c) {
            lo[c] = std::min(lo[c], p[c]);
            hi[c] = std::max(hi[c], p[c]);
        }
    }
    Coord side = 1;
    for (std::size_t c = 0; c < dim_; ++c) {
        Coord span;
        if (__builtin_sub_overflow(hi[c], lo[c], &span))
            throw RangeError("set span exceeds int64");
        side = std::max(side, checked_add(span, 1, "cubic diameter"));
    }
    return Cube(std::move(lo), side);
}

Coord LatticeSet::cubic_diameter() const
{
    return empty() ? 0 : bounding_cube().side;
}

LatticeSet floor_set(std::size_t dim, std::span<const double> reals, std::string provenance)
{
    if (dim == 0 || reals.size() % dim != 0)
        throw ContractError("real coordinates do not split into points of the requested dimension");
    std::vector<Coord> flat(reals.size());
    for (std::size_t i = 0; i < reals.size(); ++i) {
        const std::size_t pt = i / dim;
        if (!std::isfinite(reals[i]))
            throw RangeError(fmt::format("point #{} has a non-finite coordinate", pt));
        try {
            flat[i] = checked_floor(reals[i]);
        } catch (const RangeError&) {
            throw RangeError(fmt::format("point #{} coordinate {} does not floor into int64", pt, reals[i]));
        }
    }
    return LatticeSet::from_flat(dim, std::move(flat), std::move(provenance));
}

LatticeSet floor_set(const std::vector<std::vector<double>>& reals, std::string provenance)
{
    if (reals.empty())
        throw ContractError("floor_set of an empty list needs an explicit dimension");
    const std::size_t dim = reals.front().size();
    std::vector<double> flat;
    flat.reserve(reals.size() * dim);
    for (const auto& p : reals) {
        if (p.size() != dim)
            throw ContractError("points of mixed dimension");
        flat.insert(flat.end(), p.begin(), p.end());
    }
    return floor_set(dim, flat, std::move(provenance));
}

std::size_t count_in_cube(const LatticeSet& set, const Cube& cube)
{
    if (set.dim() != cube.dim())
        throw ContractError(fmt::format("set dimension {} does not match cube dimension {}", set.dim(), cube.dim()));
    if (set.empty())
        return 0;
    if (set.dim() == 1) {
        auto c = set.coords();
        const Coord lo = cube.base[0];
        const Coord hi = cube.base[0] + cube.side;
        return static_cast<std::size_t>(std::lower_bound(c.begin(), c.end(), hi) - std::lower_bound(c.begin(), c.end(), lo));
    }
    // Points are sorted by first coordinate; scan only the slab.
    const std::size_t d = set.dim();
    auto first = [&](std::size_t i) { return set.coords()[i * d]; };
    std::size_t lo = 0, hi = set.size();
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo) / 2;
        if (first(mid) < cube.base[0]) lo = mid + 1; else hi = mid;
    }
    std::size_t count = 0;
    for (std::size_t i = lo; i < set.size() && first(i) - cube.base[0] < cube.side; ++i)
        if (cube.contains(set.point(i)))
            ++count;
    return count;
}

LatticeSet affine_map(const LatticeSet& set, Coord scale, std::span<const Coord> shift)
{
    if (scale < 1)
        throw ContractError(fmt::format("affine_map scale must be a positive integer, got {}", scale));
    if (shift.size() != set.dim())
        throw ContractError(fmt::format("shift of dimension {} applied to set of dimension {}", shift.size(), set.dim()));
    std::vector<Coord> out(set.coords().begin(), set.coords().end());
    const std::size_t d = set.dim();
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = checked_add(checked_mul(out[i], scale, "affine_map"), shift[i % d], "affine_map");
    // Positive scaling plus translation preserves lexicographic order and distinctness.
    return LatticeSet::from_sorted_unique(d, std::move(out), set.provenance());
}

Cube translate(const Cube& cube, std::span<const Coord> shift)
{
    if (shift.size() != cube.dim())
        throw ContractError("shift dimension does not match cube");
    LatticePoint base = cube.base;
    for (std::size_t i = 0; i < base.size(); ++i)
        base[i] = checked_add(base[i], shift[i], "cube translation");
    return Cube(std::move(base), cube.side);
}

LatticeSet product(const LatticeSet& a, const LatticeSet& b, std::size_t cap)
{
    const std::size_t dim = a.dim() + b.dim();
    std::string prov = fmt::format("product({}; {})", a.provenance(), b.provenance());
    if (a.empty() || b.empty())
        return LatticeSet(dim, std::move(prov));
    std::size_t n;
    if (__builtin_mul_overflow(a.size(), b.size(), &n) || n > cap)
        throw ResourceError(fmt::format("product of {} x {} points exceeds the cap of {}", a.size(), b.size(), cap));
    std::vector<Coord> flat;
    flat.reserve(n * dim);
    // Lexicographic order of (a, b) pairs is the lexicographic order of the concatenation.
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto pa = a.point(i);
        for (std::size_t j = 0; j < b.size(); ++j) {
            auto pb = b.point(j);
            flat.insert(flat.end(), pa.begin(), pa.end());
            flat.insert(flat.end(), pb.begin(), pb.end());
        }
    }
    return LatticeSet::from_sorted_unique(dim, std::move(flat), std::move(prov));
}

LatticeSet set_union(const LatticeSet& a, const LatticeSet& b)
{
    if (a.dim() != b.dim())
        throw ContractError("union of sets of different dimension");
    std::vector<Coord> flat(a.coords().begin(), a.coords().end());
    flat.insert(flat.end(), b.coords().begin(), b.coords().end());
    return LatticeSet::from_flat(a.dim(), std::move(flat), fmt::format("union({}; {})", a.provenance(), b.provenance()));
}

LatticeSet restrict_to(const LatticeSet& set, const Cube& cube)
{
    if (set.dim() != cube.dim())
        throw ContractError("restrict_to: dimension mismatch");
    std::vector<Coord> flat;
    for (std::size_t i = 0; i < set.size(); ++i) {
        auto p = set.point(i);
        if (cube.contains(p))
            flat.insert(flat.end(), p.begin(), p.end());
    }
    return LatticeSet::from_sorted_unique(set.dim(), std::move(flat), set.provenance());
}

} // namespace latdim
