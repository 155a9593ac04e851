#include "latdim/dimension.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "latdim/error.hpp"
#include "latdim/parallel.hpp"

namespace latdim {

namespace {

/// p - q as an unsigned distance, valid whenever p >= q.
inline std::uint64_t udiff(Coord p, Coord q)
{
    return static_cast<std::uint64_t>(p) - static_cast<std::uint64_t>(q);
}

/// Range add / global max with leftmost argmax.
class MaxSegmentTree {
public:
    explicit MaxSegmentTree(std::size_t n)
        : n_(n), max_(4 * std::max<std::size_t>(n, 1), 0), arg_(4 * std::max<std::size_t>(n, 1), 0),
          lazy_(4 * std::max<std::size_t>(n, 1), 0)
    {
        build(1, 0, n_ - 1);
    }

    void add(std::size_t lo, std::size_t hi, long delta) { add(1, 0, n_ - 1, lo, hi, delta); }
    long max() const { return max_[1]; }
    std::size_t argmax() const { return arg_[1]; }

private:
    void build(std::size_t node, std::size_t l, std::size_t r)
    {
        arg_[node] = l;
        if (l == r)
            return;
        const std::size_t m = (l + r) / 2;
        build(2 * node, l, m);
        build(2 * node + 1, m + 1, r);
    }

    void add(std::size_t node, std::size_t l, std::size_t r, std::size_t lo, std::size_t hi, long delta)
    {
        if (hi < l || r < lo)
            return;
        if (lo <= l && r <= hi) {
            max_[node] += delta;
            lazy_[node] += delta;
            return;
        }
        const std::size_t m = (l + r) / 2;
        add(2 * node, l, m, lo, hi, delta);
        add(2 * node + 1, m + 1, r, lo, hi, delta);
        const auto a = 2 * node, b = 2 * node + 1;
        if (max_[a] >= max_[b]) {
            max_[node] = max_[a] + lazy_[node];
            arg_[node] = arg_[a];
        } else {
            max_[node] = max_[b] + lazy_[node];
            arg_[node] = arg_[b];
        }
    }

    std::size_t n_;
    std::vector<long> max_;
    std::vector<std::size_t> arg_;
    std::vector<long> lazy_;
};

/// Lexicographically sorted, duplicate-free points with multiplicities. An empty
/// `weight` means every point has weight 1.
struct WeightedPoints {
    std::size_t dim = 0;
    std::span<const Coord> coords;
    std::vector<std::size_t> weight;

    std::size_t size() const { return coords.size() / dim; }
    std::size_t w(std::size_t i) const { return weight.empty() ? 1 : weight[i]; }
    Coord at(std::size_t i, std::size_t c) const { return coords[i * dim + c]; }
};

WindowMax max_count_1d(const WeightedPoints& pts, Coord side)
{
    const std::size_t n = pts.size();
    WindowMax best{0, Cube({pts.at(0, 0)}, side)};
    const auto w = static_cast<std::uint64_t>(side);
    std::size_t j = 0, sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (j < i) {
            j = i;
            sum = 0;
        }
        while (j < n && udiff(pts.at(j, 0), pts.at(i, 0)) < w)
            sum += pts.w(j++);
        if (sum > best.count) {
            best.count = sum;
            best.witness.base[0] = pts.at(i, 0);
        }
        sum -= pts.w(i);
    }
    return best;
}

WindowMax max_count_2d(const WeightedPoints& pts, Coord side)
{
    const std::size_t n = pts.size();
    auto x = [&](std::size_t i) { return pts.at(i, 0); };
    auto y = [&](std::size_t i) { return pts.at(i, 1); };
    std::vector<Coord> ys(n);
    for (std::size_t i = 0; i < n; ++i)
        ys[i] = y(i);
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

    // Point with ordinate v raises every anchor a with a <= v < a + side.
    std::vector<std::size_t> lo_idx(n), hi_idx(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Coord v = y(i);
        const __int128 first_anchor = static_cast<__int128>(v) - side + 1;
        lo_idx[i] = static_cast<std::size_t>(
            std::partition_point(ys.begin(), ys.end(), [&](Coord a) { return static_cast<__int128>(a) < first_anchor; }) -
            ys.begin());
        hi_idx[i] = static_cast<std::size_t>(std::lower_bound(ys.begin(), ys.end(), v) - ys.begin());
    }

    MaxSegmentTree tree(ys.size());
    const auto w = static_cast<std::uint64_t>(side);
    WindowMax best{0, Cube({x(0), ys[0]}, side)};
    std::size_t left = 0, right = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && x(i) == x(i - 1))
            continue;
        const Coord anchor = x(i);
        while (left < i) {
            tree.add(lo_idx[left], hi_idx[left], -static_cast<long>(pts.w(left)));
            ++left;
        }
        while (right < n && udiff(x(right), anchor) < w) {
            tree.add(lo_idx[right], hi_idx[right], static_cast<long>(pts.w(right)));
            ++right;
        }
        const auto c = static_cast<std::size_t>(tree.max());
        if (c > best.count) {
            best.count = c;
            best.witness.base = {anchor, ys[tree.argmax()]};
        }
    }
    return best;
}

WindowMax max_count_weighted(const WeightedPoints& pts, Coord side);

/// Fixes the first coordinate of the anchor and recurses on the slab behind it,
/// merging points that coincide once the first coordinate is dropped.
WindowMax max_count_slab(const WeightedPoints& pts, Coord side)
{
    const std::size_t d = pts.dim;
    const std::size_t n = pts.size();
    const auto w = static_cast<std::uint64_t>(side);
    WindowMax best{0, Cube(LatticePoint(pts.coords.begin(), pts.coords.begin() + static_cast<std::ptrdiff_t>(d)), side)};
    std::size_t end = 0, total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && pts.at(i, 0) == pts.at(i - 1, 0)) {
            total -= pts.w(i);
            continue;
        }
        if (end < i) {
            end = i;
            total = 0;
        }
        while (end < n && udiff(pts.at(end, 0), pts.at(i, 0)) < w)
            total += pts.w(end++);
        if (total > best.count) {
            std::vector<std::size_t> order(end - i);
            std::iota(order.begin(), order.end(), i);
            auto rest = [&](std::size_t k) { return pts.coords.subspan(k * d + 1, d - 1); };
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                auto ra = rest(a), rb = rest(b);
                return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
            });
            std::vector<Coord> flat;
            std::vector<std::size_t> weight;
            for (std::size_t k : order) {
                auto r = rest(k);
                if (!weight.empty() && std::equal(r.begin(), r.end(), flat.end() - static_cast<std::ptrdiff_t>(d - 1))) {
                    weight.back() += pts.w(k);
                    continue;
                }
                flat.insert(flat.end(), r.begin(), r.end());
                weight.push_back(pts.w(k));
            }
            const auto m = max_count_weighted(WeightedPoints{d - 1, flat, std::move(weight)}, side);
            if (m.count > best.count) {
                best.count = m.count;
                LatticePoint base{pts.at(i, 0)};
                base.insert(base.end(), m.witness.base.begin(), m.witness.base.end());
                best.witness = Cube(std::move(base), side);
            }
        }
        total -= pts.w(i);
    }
    return best;
}

WindowMax max_count_weighted(const WeightedPoints& pts, Coord side)
{
    switch (pts.dim) {
    case 1:
        return max_count_1d(pts, side);
    case 2:
        return max_count_2d(pts, side);
    default:
        return max_count_slab(pts, side);
    }
}

double safe_log(double v) { return std::log(v); }

} // namespace

// --- ScaleGrid ------------------------------------------------------------------

ScaleGrid::ScaleGrid(std::vector<Coord> sides)
    : sides_(std::move(sides))
{
    if (sides_.empty())
        throw ContractError("scale grid must not be empty");
    for (std::size_t i = 0; i < sides_.size(); ++i) {
        if (sides_[i] < 1)
            throw ContractError(fmt::format("scale grid sides must be positive, got {}", sides_[i]));
        if (i > 0 && sides_[i] <= sides_[i - 1])
            throw ContractError("scale grid sides must be strictly increasing");
    }
}

ScaleGrid ScaleGrid::dyadic(int lo, int hi)
{
    if (lo < 0 || hi > 62 || lo > hi)
        throw ContractError(fmt::format("dyadic exponents must satisfy 0 <= lo <= hi <= 62, got {}..{}", lo, hi));
    std::vector<Coord> s;
    for (int j = lo; j <= hi; ++j)
        s.push_back(Coord{1} << j);
    return ScaleGrid(std::move(s));
}

ScaleGrid ScaleGrid::parse(std::string_view text)
{
    auto parse_int = [&](std::string_view t) {
        long long v;
        auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || p != t.data() + t.size())
            throw ContractError(fmt::format("bad integer '{}' in scale spec '{}'", t, text));
        return v;
    };
    if (text.starts_with("pow2:")) {
        auto body = text.substr(5);
        auto dots = body.find("..");
        if (dots == std::string_view::npos)
            throw ContractError(fmt::format("scale spec '{}' must look like pow2:a..b", text));
        return dyadic(static_cast<int>(parse_int(body.substr(0, dots))), static_cast<int>(parse_int(body.substr(dots + 2))));
    }
    std::vector<Coord> s;
    while (!text.empty()) {
        auto comma = text.find(',');
        s.push_back(parse_int(text.substr(0, comma)));
        if (comma == std::string_view::npos)
            break;
        text.remove_prefix(comma + 1);
    }
    return ScaleGrid(std::move(s));
}

ScaleGrid ScaleGrid::default_for(const LatticeSet& set)
{
    const Coord diam = set.cubic_diameter();
    if (diam < 2)
        throw ContractError(fmt::format("set of cubic diameter {} is too small for a dyadic grid", diam));
    int j = 1;
    while (j < 62 && (Coord{1} << (j + 1)) <= diam)
        ++j;
    return dyadic(1, j);
}

FitWindow top_window(std::size_t scale_count, std::optional<std::size_t> top)
{
    const std::size_t k = top ? std::min(*top, scale_count) : (scale_count - scale_count / 2);
    return {scale_count - k, scale_count};
}

// --- Profiles -------------------------------------------------------------------

WindowMax max_count_in_cube(const LatticeSet& set, Coord side)
{
    if (set.empty())
        throw ContractError("maximum count over cubes of an empty set");
    if (side < 1)
        throw ContractError("cube side must be positive");
    return max_count_weighted(WeightedPoints{set.dim(), set.coords(), {}}, side);
}

ScaleProfile counting_profile(const LatticeSet& set, const ScaleGrid& grid, unsigned threads)
{
    if (set.empty())
        throw ContractError("counting profile of an empty set");
    ScaleProfile out{ProfileKind::counting, std::vector<ScaleEntry>(grid.size())};
    parallel_for(grid.size(), threads, [&](std::size_t i) {
        const Coord side = grid.sides()[i];
        auto m = max_count_in_cube(set, side);
        out.entries[i] = {side, m.count, std::move(m.witness)};
    });
    return out;
}

ScaleProfile mass_profile(const LatticeSet& set, const ScaleGrid& grid)
{
    if (set.empty())
        throw ContractError("mass profile of an empty set");
    ScaleProfile out{ProfileKind::mass, {}};
    out.entries.reserve(grid.size());
    for (Coord half : grid.sides()) {
        Cube c = CenteredCube(half).as_cube(set.dim());
        const std::size_t n = count_in_cube(set, c);
        out.entries.push_back({half, n, std::move(c)});
    }
    return out;
}

// --- Fitting --------------------------------------------------------------------

DimensionEstimate fit_dimension(const ScaleProfile& profile, FitWindow window)
{
    const auto& e = profile.entries;
    if (window.first >= window.last || window.last > e.size())
        throw ContractError(fmt::format("fit window [{}, {}) is outside a profile of {} scales", window.first,
                                        window.last, e.size()));
    DimensionEstimate out;
    out.window = window;
    out.per_scale.reserve(e.size());
    for (const auto& s : e) {
        if (s.count == 0 || s.side <= 1)
            out.per_scale.push_back(std::numeric_limits<double>::quiet_NaN());
        else
            out.per_scale.push_back(safe_log(static_cast<double>(s.count)) / safe_log(static_cast<double>(s.side)));
    }

    std::vector<double> xs, ys;
    for (std::size_t i = window.first; i < window.last; ++i) {
        if (e[i].count == 0)
            continue;
        xs.push_back(safe_log(static_cast<double>(e[i].side)));
        ys.push_back(safe_log(static_cast<double>(e[i].count)));
    }
    if (xs.size() < 2)
        throw ContractError(fmt::format("fit window [{}, {}) holds {} scale(s) with a positive count; need 2",
                                        window.first, window.last, xs.size()));
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (out.intercept + out.slope * xs[i]);
        out.residual += r * r;
    }
    return out;
}

double measure_sup(const ScaleProfile& profile, double alpha)
{
    if (!(alpha >= 0))
        throw ContractError(fmt::format("measure exponent must be non-negative, got {}", alpha));
    double best = 0.0;
    for (const auto& s : profile.entries)
        best = std::max(best, static_cast<double>(s.count) / std::pow(static_cast<double>(s.witness.side), alpha));
    return best;
}

// --- Regular subsets ------------------------------------------------------------

SupResult counting_sup(const LatticeSet& set, double alpha, Coord max_side)
{
    if (set.empty())
        throw ContractError("supremum over cubes of an empty set");
    SupResult best{-1.0, Cube(set.point_vec(0), 1)};
    const std::size_t n = set.size();
    const std::size_t d = set.dim();

    if (d == 1) {
        // The ratio is maximized by a tight interval [x_i, x_j].
        auto xs = set.coords();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n && xs[j] - xs[i] < max_side; ++j) {
                const Coord side = xs[j] - xs[i] + 1;
                const double v = static_cast<double>(j - i + 1) / std::pow(static_cast<double>(side), alpha);
                if (v > best.value) {
                    best.value = v;
                    best.cube = Cube(LatticePoint{xs[i]}, side);
                }
            }
        return best;
    }

    // Between consecutive tight sides the count is constant, so only tight sides can attain the sup.
    std::vector<Coord> sides{1};
    if (n * n * d <= static_cast<std::size_t>(max_side)) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                for (std::size_t c = 0; c < d; ++c) {
                    const Coord s = std::abs(set.point(i)[c] - set.point(j)[c]) + 1;
                    if (s <= max_side)
                        sides.push_back(s);
                }
        std::sort(sides.begin(), sides.end());
        sides.erase(std::unique(sides.begin(), sides.end()), sides.end());
    } else {
        sides.resize(static_cast<std::size_t>(max_side));
        std::iota(sides.begin(), sides.end(), Coord{1});
    }
    for (Coord side : sides) {
        auto m = max_count_in_cube(set, side);
        const double v = static_cast<double>(m.count) / std::pow(static_cast<double>(side), alpha);
        if (v > best.value) {
            best.value = v;
            best.cube = std::move(m.witness);
        }
        if (m.count == n && alpha >= 0)
            break; // larger sides only shrink the ratio
    }
    return best;
}

RegularSubset extract_regular_subset(const LatticeSet& set, const Cube& container, double alpha)
{
    if (!(alpha > 0))
        throw ContractError(fmt::format("regular subset extraction needs alpha > 0, got {}", alpha));
    if (set.dim() != container.dim())
        throw ContractError("set and container cube differ in dimension");
    const std::size_t d = set.dim();
    if (count_in_cube(set, container) != set.size())
        throw ContractError("set is not contained in the given cube");

    const double side_e = static_cast<double>(container.side);
    const double s_value = static_cast<double>(set.size()) / std::pow(side_e, alpha);
    const double threshold = std::pow(6.0, static_cast<double>(d));
    if (s_value < threshold)
        throw ContractError(fmt::format("S = |E| / ||C_E||^alpha = {} is below 6^d = {}", s_value, threshold));

    // Partition C_E into m^d sub-cubes of real side ||C_E|| / m >= ell.
    const double ell = std::pow(s_value, 1.0 / static_cast<double>(d)) / 6.0;
    auto m = static_cast<Coord>(std::floor(side_e / ell));
    while (m > 1 && static_cast<double>(m) * ell > side_e)
        --m;
    m = std::max<Coord>(m, 1);

    // Keep the first point (in lexicographic order) of each occupied sub-cube.
    std::vector<Coord> kept;
    {
        std::vector<std::pair<std::vector<Coord>, std::size_t>> cells;
        cells.reserve(set.size());
        for (std::size_t i = 0; i < set.size(); ++i) {
            auto p = set.point(i);
            std::vector<Coord> cell(d);
            for (std::size_t c = 0; c < d; ++c) {
                const __int128 off = static_cast<__int128>(p[c]) - container.base[c];
                cell[c] = static_cast<Coord>(off * m / container.side);
            }
            cells.emplace_back(std::move(cell), i);
        }
        std::stable_sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k > 0 && cells[k].first == cells[k - 1].first)
                continue;
            auto p = set.point(cells[k].second);
            kept.insert(kept.end(), p.begin(), p.end());
        }
    }
    LatticeSet current = LatticeSet::from_flat(d, std::move(kept), set.provenance());

    const double upper = std::pow(2.0, static_cast<double>(d)) + 1.0;
    SupResult sup = counting_sup(current, alpha, container.side);
    while (sup.value >= upper) {
        // Drop the lexicographically largest point of the current maximizing cube.
        std::size_t victim = current.size();
        for (std::size_t i = current.size(); i-- > 0;)
            if (sup.cube.contains(current.point(i))) {
                victim = i;
                break;
            }
        std::vector<Coord> flat;
        flat.reserve((current.size() - 1) * d);
        for (std::size_t i = 0; i < current.size(); ++i)
            if (i != victim) {
                auto p = current.point(i);
                flat.insert(flat.end(), p.begin(), p.end());
            }
        current = LatticeSet::from_sorted_unique(d, std::move(flat), current.provenance());
        sup = counting_sup(current, alpha, container.side);
    }

    RegularSubset out;
    out.subset = restrict_to(current, sup.cube);
    out.cube = sup.cube;
    out.sup_value = sup.value;
    out.s_value = s_value;
    return out;
}

} // namespace latdim
