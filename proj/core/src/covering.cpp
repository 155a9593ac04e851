#include "latdim/covering.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "latdim/error.hpp"
#include "latdim/parallel.hpp"

namespace latdim {

namespace {

Coord max_cover_side(const Cube& cube, double alpha, double ratio)
{
    if (!(alpha >= 0))
        throw ContractError(fmt::format("cover exponent must be non-negative, got {}", alpha));
    if (!(ratio > 0 && ratio <= 1))
        throw ContractError(fmt::format("ratio cap must lie in (0, 1], got {}", ratio));
    const double cap = ratio * static_cast<double>(cube.side);
    if (cap < 1)
        throw ContractError(fmt::format("r * ||C|| = {} < 1: no admissible cover", cap));
    return static_cast<Coord>(std::floor(cap));
}

void require_inside(const LatticeSet& points, const Cube& cube)
{
    if (points.dim() != cube.dim())
        throw ContractError("cover: point set and cube differ in dimension");
    if (count_in_cube(points, cube) != points.size())
        throw ContractError("cover: points must lie inside the cube");
}

} // namespace

CoverSolution optimal_cover_1d(const LatticeSet& points, const Cube& cube, double alpha, double ratio)
{
    if (points.dim() != 1)
        throw ContractError("optimal_cover_1d needs a 1-dimensional set");
    const Coord cap = max_cover_side(cube, alpha, ratio);
    require_inside(points, cube);
    CoverSolution out{{}, 0.0, alpha, ratio};
    const std::size_t n = points.size();
    if (n == 0)
        return out;

    auto xs = points.coords();
    const double norm = static_cast<double>(cube.side);
    std::vector<double> best(n + 1, 0.0);
    std::vector<std::size_t> last(n, 0); // index of the last point covered by the interval starting at i
    for (std::size_t i = n; i-- > 0;) {
        best[i] = std::numeric_limits<double>::infinity();
        for (std::size_t j = i; j < n && xs[j] - xs[i] < cap; ++j) {
            const double len = static_cast<double>(xs[j] - xs[i] + 1);
            const double c = std::pow(len / norm, alpha) + best[j + 1];
            if (c < best[i]) {
                best[i] = c;
                last[i] = j;
            }
        }
    }
    out.cost = best[0];
    for (std::size_t i = 0; i < n; i = last[i] + 1)
        out.cubes.emplace_back(LatticePoint{xs[i]}, xs[last[i]] - xs[i] + 1);
    return out;
}

CoverSolution greedy_cover_nd(const LatticeSet& points, const Cube& cube, double alpha, double ratio)
{
    const Coord cap = max_cover_side(cube, alpha, ratio);
    require_inside(points, cube);
    CoverSolution out{{}, 0.0, alpha, ratio};
    if (points.empty())
        return out;

    const std::size_t d = points.dim();
    const double norm = static_cast<double>(cube.side);
    struct Node {
        double cost = 0.0;
        std::vector<Cube> cubes;
    };
    auto cube_at = [&](const std::vector<Coord>& key, int level) {
        LatticePoint base(d);
        for (std::size_t c = 0; c < d; ++c)
            base[c] = cube.base[c] + (key[c] << level);
        return Cube(std::move(base), Coord{1} << level);
    };

    std::map<std::vector<Coord>, Node> nodes;
    const double unit_cost = std::pow(1.0 / norm, alpha);
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto p = points.point(i);
        std::vector<Coord> key(d);
        for (std::size_t c = 0; c < d; ++c)
            key[c] = p[c] - cube.base[c];
        nodes.emplace(key, Node{unit_cost, {cube_at(key, 0)}});
    }

    for (int level = 1; level < 62 && (Coord{1} << level) <= cap && nodes.size() > 1; ++level) {
        std::map<std::vector<Coord>, Node> parents;
        for (auto& [key, node] : nodes) {
            std::vector<Coord> pk(d);
            for (std::size_t c = 0; c < d; ++c)
                pk[c] = key[c] >> 1;
            auto& parent = parents[pk];
            parent.cost += node.cost;
            parent.cubes.insert(parent.cubes.end(), std::make_move_iterator(node.cubes.begin()),
                                std::make_move_iterator(node.cubes.end()));
        }
        const double block_cost = std::pow(static_cast<double>(Coord{1} << level) / norm, alpha);
        for (auto& [key, node] : parents) {
            if (block_cost <= node.cost) {
                node.cost = block_cost;
                node.cubes.assign(1, cube_at(key, level));
            }
        }
        nodes = std::move(parents);
    }
    for (auto& [key, node] : nodes) {
        out.cost += node.cost;
        out.cubes.insert(out.cubes.end(), node.cubes.begin(), node.cubes.end());
    }
    return out;
}

CoverSolution solve_cover(const LatticeSet& points, const Cube& cube, double alpha, double ratio)
{
    return points.dim() == 1 ? optimal_cover_1d(points, cube, alpha, ratio) : greedy_cover_nd(points, cube, alpha, ratio);
}

CovdimResult covering_dimension_estimate(const LatticeSet& set, const ScaleGrid& grid, const CovdimOptions& opts)
{
    if (opts.alphas.empty())
        throw ContractError("covering dimension needs a non-empty alpha grid");
    if (!std::is_sorted(opts.alphas.begin(), opts.alphas.end()))
        throw ContractError("alpha grid must be increasing");
    if (opts.ratios.empty())
        throw ContractError("covering dimension needs at least one ratio cap");

    const auto& sides = grid.sides();
    const FitWindow window = top_window(sides.size(), opts.window);
    if (window.last - window.first < 2)
        throw ContractError("covering dimension fit needs at least two scales");

    // The smallest ratio that is admissible on every scale of the fit window.
    std::optional<double> chosen;
    bool any_admissible = false;
    for (double r : opts.ratios) {
        if (!(r > 0 && r <= 1))
            throw ContractError(fmt::format("ratio cap must lie in (0, 1], got {}", r));
        bool ok = true;
        for (std::size_t i = 0; i < sides.size(); ++i) {
            const bool adm = r * static_cast<double>(sides[i]) >= 1;
            any_admissible = any_admissible || adm;
            if (i >= window.first && i < window.last && !adm)
                ok = false;
        }
        if (ok && (!chosen || r < *chosen))
            chosen = r;
    }
    if (!any_admissible)
        throw ContractError("no ratio cap is admissible (r * side >= 1) at any scale");
    if (!chosen)
        throw ContractError("no ratio cap is admissible on every scale of the fit window");

    const ScaleProfile witnesses = counting_profile(set, grid, opts.threads);
    std::vector<LatticeSet> local(sides.size());
    for (std::size_t i = 0; i < sides.size(); ++i)
        local[i] = restrict_to(set, witnesses.entries[i].witness);

    // Every admissible (alpha, side, ratio) cell, in that nesting order.
    struct Cell {
        std::size_t a, s;
        double r;
    };
    std::vector<Cell> cells;
    for (std::size_t a = 0; a < opts.alphas.size(); ++a)
        for (std::size_t s = 0; s < sides.size(); ++s)
            for (double r : opts.ratios)
                if (r * static_cast<double>(sides[s]) >= 1)
                    cells.push_back({a, s, r});
    std::vector<double> costs(cells.size());
    parallel_for(cells.size(), opts.threads, [&](std::size_t k) {
        const auto& c = cells[k];
        costs[k] = solve_cover(local[c.s], witnesses.entries[c.s].witness, opts.alphas[c.a], c.r).cost;
    });

    CovdimResult out;
    out.ratio_used = *chosen;
    out.window = window;
    std::vector<std::vector<double>> at_chosen(opts.alphas.size(), std::vector<double>(sides.size(), 0.0));
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const auto& c = cells[k];
        out.table.push_back({opts.alphas[c.a], sides[c.s], c.r, costs[k]});
        if (c.r == *chosen)
            at_chosen[c.a][c.s] = costs[k];
    }

    auto ls_slope = [](const std::vector<double>& xs, const std::vector<double>& ys) {
        const double n = static_cast<double>(xs.size());
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            mx += xs[i] / n;
            my += ys[i] / n;
        }
        double sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxx += (xs[i] - mx) * (xs[i] - mx);
            sxy += (xs[i] - mx) * (ys[i] - my);
        }
        return sxy / sxx;
    };

    // Cost exponents along the scale axis (fixed ratio) and along the ratio axis
    // (fixed scale, averaged over the window).
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::pair<double, double>>> by_cell;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const auto& c = cells[k];
        const double eff = std::floor(c.r * static_cast<double>(sides[c.s])) / static_cast<double>(sides[c.s]);
        by_cell[{c.a, c.s}].emplace_back(std::log(eff), std::log(costs[k]));
    }
    for (std::size_t a = 0; a < opts.alphas.size(); ++a) {
        std::vector<double> xs, ys;
        for (std::size_t s = window.first; s < window.last; ++s) {
            xs.push_back(std::log(static_cast<double>(sides[s])));
            ys.push_back(std::log(at_chosen[a][s]));
        }
        out.decay.push_back(ls_slope(xs, ys));

        double ratio_sum = 0;
        std::size_t ratio_fits = 0;
        for (std::size_t s = window.first; s < window.last; ++s) {
            const auto& pts = by_cell[{a, s}];
            std::vector<double> rx, ry;
            for (const auto& [x, y] : pts) {
                if (!rx.empty() && x == rx.back())
                    continue; // ratios that round to the same cap
                rx.push_back(x);
                ry.push_back(y);
            }
            if (rx.size() < 2)
                continue;
            ratio_sum += ls_slope(rx, ry);
            ++ratio_fits;
        }
        out.ratio_decay.push_back(ratio_fits == 0 ? 0.0 : ratio_sum / static_cast<double>(ratio_fits));
        out.balance.push_back(out.decay.back() - out.ratio_decay.back());

        if (!out.threshold_estimate && at_chosen[a][window.last - 1] < opts.tau)
            out.threshold_estimate = opts.alphas[a];
    }

    // Below the dimension the cost blows up as the ratio shrinks; above it the cost
    // decays with scale. The balance falls through zero at the dimension.
    const auto& alpha = opts.alphas;
    const auto& g = out.balance;
    auto first_down = std::find_if(g.begin(), g.end(), [](double v) { return v <= 0; });
    if (first_down == g.end()) {
        out.saturated = true;
        out.estimate = alpha.back();
    } else {
        const auto i = static_cast<std::size_t>(first_down - g.begin());
        if (g[i] == 0) {
            out.estimate = alpha[i];
        } else if (i > 0) {
            out.estimate = alpha[i - 1] + g[i - 1] * (alpha[i] - alpha[i - 1]) / (g[i - 1] - g[i]);
        } else if (alpha.size() > 1 && g[1] < g[0]) {
            out.estimate = std::max(0.0, alpha[0] + g[0] * (alpha[1] - alpha[0]) / (g[0] - g[1]));
        } else {
            out.estimate = std::max(0.0, alpha[0] + g[0]);
        }
    }
    return out;
}

std::vector<double> parse_alpha_grid(std::string_view text)
{
    auto num = [&](std::string_view t) {
        double v;
        auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || p != t.data() + t.size())
            throw ContractError(fmt::format("bad number '{}' in alpha grid '{}'", t, text));
        return v;
    };
    auto c1 = text.find(':');
    auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
    if (c2 == std::string_view::npos)
        throw ContractError(fmt::format("alpha grid '{}' must look like lo:hi:step", text));
    const double lo = num(text.substr(0, c1));
    const double hi = num(text.substr(c1 + 1, c2 - c1 - 1));
    const double step = num(text.substr(c2 + 1));
    if (!(step > 0) || hi < lo || lo < 0)
        throw ContractError(fmt::format("alpha grid '{}' needs 0 <= lo <= hi and step > 0", text));
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= n; ++i)
        // Round to 12 decimals so that 0:1:0.05 hits 1.0 exactly.
        out.push_back(std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12);
    return out;
}

} // namespace latdim
