#include "latdim/projection.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "latdim/checked.hpp"
#include "latdim/error.hpp"
#include "latdim/parallel.hpp"
#include "latdim/rng.hpp"

namespace latdim {

ProjectionMatrix::ProjectionMatrix(std::size_t k, std::size_t d, std::vector<double> entries)
    : k_(k), d_(d), entries_(std::move(entries))
{
    if (k_ < 1 || k_ + 1 > d_)
        throw ContractError(fmt::format("projection needs 1 <= k <= d - 1, got k = {}, d = {}", k_, d_));
    if (entries_.size() != k_ * (d_ - k_))
        throw ContractError(fmt::format("a {} x {} matrix needs {} entries, got {}", k_, d_ - k_, k_ * (d_ - k_),
                                        entries_.size()));
    for (double v : entries_)
        if (!std::isfinite(v))
            throw ContractError("projection matrix entries must be finite");
}

ProjectionMatrix ProjectionMatrix::parse(std::string_view text)
{
    std::vector<std::vector<double>> rows;
    while (true) {
        auto semi = text.find(';');
        auto row_text = text.substr(0, semi);
        std::vector<double> row;
        while (true) {
            auto comma = row_text.find(',');
            auto tok = row_text.substr(0, comma);
            while (!tok.empty() && tok.front() == ' ')
                tok.remove_prefix(1);
            while (!tok.empty() && tok.back() == ' ')
                tok.remove_suffix(1);
            double v;
            auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (tok.empty() || ec != std::errc() || p != tok.data() + tok.size())
                throw ContractError(fmt::format("bad matrix entry '{}'", tok));
            row.push_back(v);
            if (comma == std::string_view::npos)
                break;
            row_text.remove_prefix(comma + 1);
        }
        rows.push_back(std::move(row));
        if (semi == std::string_view::npos)
            break;
        text.remove_prefix(semi + 1);
    }
    const std::size_t cols = rows.front().size();
    std::vector<double> flat;
    for (const auto& r : rows) {
        if (r.size() != cols)
            throw ContractError("matrix rows differ in length");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return ProjectionMatrix(rows.size(), rows.size() + cols, std::move(flat));
}

double ProjectionMatrix::apply_row(std::span<const Coord> point, std::size_t row) const
{
    double my = 0.0;
    const std::size_t c = cols();
    const double* m = entries_.data() + row * c;
    for (std::size_t j = 0; j < c; ++j)
        my += m[j] * static_cast<double>(point[k_ + j]);
    return static_cast<double>(point[row]) + my;
}

namespace {

std::vector<Coord> projected_coords(const LatticeSet& set, const ProjectionMatrix& m, std::size_t* ties)
{
    if (set.dim() != m.d())
        throw ContractError(fmt::format("projection for dimension {} applied to a set of dimension {}", m.d(), set.dim()));
    const std::size_t k = m.k();
    std::vector<Coord> out(set.size() * k);
    std::size_t tie_count = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        auto p = set.point(i);
        for (std::size_t r = 0; r < k; ++r) {
            const double v = m.apply_row(p, r);
            const double f = checked_floor(v, "projected coordinate");
            const double frac = v - f;
            if (frac != 0.0 && (frac <= boundary_tie_band || 1.0 - frac <= boundary_tie_band))
                ++tie_count;
            out[i * k + r] = static_cast<Coord>(f);
        }
    }
    if (ties)
        *ties = tie_count;
    return out;
}

} // namespace

Projected project_with_diagnostics(const LatticeSet& set, const ProjectionMatrix& m)
{
    Projected out;
    auto coords = projected_coords(set, m, &out.boundary_ties);
    out.set = LatticeSet::from_flat(m.k(), std::move(coords), set.provenance());
    return out;
}

LatticeSet project(const LatticeSet& set, const ProjectionMatrix& m)
{
    return project_with_diagnostics(set, m).set;
}

LatticeSet sumset(const std::vector<LatticeSet>& sets, const std::vector<double>& lambdas, std::size_t cap)
{
    if (sets.empty() || sets.size() != lambdas.size())
        throw ContractError(fmt::format("sumset needs as many lambdas as sets (got {} sets, {} lambdas)", sets.size(),
                                        lambdas.size()));
    std::size_t total = 1;
    for (const auto& s : sets) {
        if (s.dim() != 1)
            throw ContractError("sumset operands must be 1-dimensional");
        if (__builtin_mul_overflow(total, s.size(), &total) || total > cap)
            throw ResourceError(fmt::format("sumset would enumerate more than {} sums", cap));
    }
    for (double l : lambdas)
        if (!std::isfinite(l))
            throw ContractError("sumset lambdas must be finite");
    if (total == 0)
        return LatticeSet(1, "sumset");

    std::vector<Coord> out;
    out.reserve(total);
    const std::size_t n = sets.size();
    // Odometer over the non-leading operands; the tail sum is accumulated left to right.
    std::vector<std::size_t> idx(n, 0);
    auto tail_sum = [&] {
        double t = 0.0;
        for (std::size_t i = 1; i < n; ++i)
            t += lambdas[i] * static_cast<double>(sets[i].coords()[idx[i]]);
        return t;
    };
    auto head = sets[0].coords();
    while (true) {
        const double tail = tail_sum();
        for (Coord a : head)
            out.push_back(checked_floor(lambdas[0] * static_cast<double>(a) + tail, "sumset value"));
        std::size_t i = n;
        while (i-- > 1) {
            if (++idx[i] < sets[i].size())
                break;
            idx[i] = 0;
        }
        if (i == 0 || n == 1)
            break;
    }
    return LatticeSet::from_flat(1, std::move(out), "sumset");
}

EnergyReport additive_energy(const LatticeSet& set, const ProjectionMatrix& m)
{
    auto coords = projected_coords(set, m, nullptr);
    const std::size_t k = m.k();
    const std::size_t n = set.size();
    EnergyReport out;
    out.set_size = n;
    if (n == 0)
        return out;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;
    auto row = [&](std::size_t i) { return std::span<const Coord>(coords.data() + i * k, k); };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        auto ra = row(a), rb = row(b);
        return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
    });
    std::uint64_t run = 1;
    for (std::size_t i = 1; i <= n; ++i) {
        if (i < n && std::ranges::equal(row(order[i]), row(order[i - 1]))) {
            ++run;
            continue;
        }
        out.rep_counts.push_back(run);
        out.energy += run * run;
        run = 1;
    }
    out.image_size = out.rep_counts.size();
    std::sort(out.rep_counts.begin(), out.rep_counts.end(), std::greater<>());
    return out;
}

bool cauchy_schwarz_holds(const EnergyReport& r)
{
    const auto lhs = static_cast<unsigned __int128>(r.image_size) * r.energy;
    const auto rhs = static_cast<unsigned __int128>(r.set_size) * r.set_size;
    return lhs >= rhs;
}

ProjectionMatrix sample_matrix(std::size_t k, std::size_t d, EntryBox box, std::uint64_t seed, std::uint64_t index)
{
    SampleRng rng(seed, index);
    std::vector<double> e(k * (d - k));
    for (auto& v : e)
        v = rng.uniform(box.lo, box.hi);
    return ProjectionMatrix(k, d, std::move(e));
}

TransversalityEstimate empirical_transversality(std::span<const Coord> z, std::span<const Coord> z2, std::size_t k,
                                                EntryBox box, std::size_t samples, std::uint64_t seed, unsigned threads)
{
    if (z.size() != z2.size())
        throw ContractError("transversality points differ in dimension");
    if (std::ranges::equal(z, z2))
        throw ContractError("transversality needs two distinct points");
    if (samples < 1)
        throw ContractError("transversality needs at least one sample");
    if (!(box.hi > box.lo))
        throw ContractError("entry box must be non-degenerate");
    const std::size_t d = z.size();
    std::vector<char> hit(samples, 0);
    parallel_for(samples, threads, [&](std::size_t i) {
        const auto m = sample_matrix(k, d, box, seed, i);
        bool same = true;
        for (std::size_t r = 0; r < k && same; ++r)
            same = std::floor(m.apply_row(z, r)) == std::floor(m.apply_row(z2, r));
        hit[i] = same ? 1 : 0;
    });
    TransversalityEstimate out;
    out.samples = samples;
    out.hits = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
    out.fraction = static_cast<double>(out.hits) / static_cast<double>(samples);
    out.std_error = std::sqrt(out.fraction * (1.0 - out.fraction) / static_cast<double>(samples));
    return out;
}

} // namespace latdim
