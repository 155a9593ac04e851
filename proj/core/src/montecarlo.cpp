#include "latdim/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "latdim/error.hpp"
#include "latdim/parallel.hpp"

namespace latdim {

using nlohmann::json;

// --- Config ---------------------------------------------------------------------

ExperimentConfig config_from_json(const json& j)
{
    static const std::set<std::string> known{"sets",  "k",         "samples", "box",        "scales",
                                             "window", "seed",     "tolerance", "target",   "counting",
                                             "alpha", "delta_grid", "ratio_bound"};
    if (!j.is_object())
        throw ContractError("experiment config must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!known.count(key))
            throw ContractError(fmt::format("unknown experiment config key '{}'", key));
    ExperimentConfig cfg;
    try {
        if (!j.contains("sets") || !j.at("sets").is_array() || j.at("sets").empty())
            throw ContractError("experiment config needs a non-empty \"sets\" array");
        for (const auto& s : j.at("sets"))
            cfg.sets.push_back(generator_spec_from_json(s));
        cfg.k = j.value("k", std::size_t{1});
        cfg.samples = j.value("samples", std::size_t{200});
        if (j.contains("box")) {
            auto b = j.at("box").get<std::vector<double>>();
            if (b.size() != 2)
                throw ContractError("\"box\" must be [lo, hi]");
            cfg.box = {b[0], b[1]};
        }
        if (j.contains("scales")) {
            const auto& s = j.at("scales");
            cfg.scales = s.is_string() ? ScaleGrid::parse(s.get<std::string>()) : ScaleGrid(s.get<std::vector<Coord>>());
        }
        if (j.contains("window") && !j.at("window").is_null())
            cfg.window = j.at("window").get<std::size_t>();
        cfg.seed = j.value("seed", default_seed);
        cfg.tolerance = j.value("tolerance", 0.07);
        if (j.contains("target") && !j.at("target").is_null())
            cfg.target = j.at("target").get<double>();
        cfg.counting = j.value("counting", true);
        if (j.contains("alpha") && !j.at("alpha").is_null())
            cfg.alpha = j.at("alpha").get<double>();
        cfg.delta_grid = j.value("delta_grid", std::vector<double>{});
        cfg.ratio_bound = j.value("ratio_bound", 5.0);
    } catch (const json::exception& e) {
        throw ContractError(fmt::format("bad experiment config: {}", e.what()));
    }
    if (cfg.samples < 1)
        throw ContractError("experiment needs at least one sample");
    if (!(cfg.box.hi > cfg.box.lo))
        throw ContractError("entry box must be non-degenerate");
    if (cfg.k < 1)
        throw ContractError("projection rank k must be at least 1");
    return cfg;
}

json to_json(const ExperimentConfig& cfg)
{
    json sets = json::array();
    for (const auto& s : cfg.sets)
        sets.push_back(to_json(s));
    json j = {{"sets", sets},
              {"k", cfg.k},
              {"samples", cfg.samples},
              {"box", {cfg.box.lo, cfg.box.hi}},
              {"seed", cfg.seed},
              {"tolerance", cfg.tolerance},
              {"counting", cfg.counting},
              {"ratio_bound", cfg.ratio_bound}};
    j["scales"] = cfg.scales ? json(cfg.scales->sides()) : json(nullptr);
    j["window"] = cfg.window ? json(*cfg.window) : json(nullptr);
    j["target"] = cfg.target ? json(*cfg.target) : json(nullptr);
    j["alpha"] = cfg.alpha ? json(*cfg.alpha) : json(nullptr);
    j["delta_grid"] = cfg.delta_grid;
    return j;
}

// --- Helpers --------------------------------------------------------------------

Quantiles quantiles(std::vector<double> v)
{
    if (v.empty())
        throw ContractError("quantiles of an empty sample");
    std::sort(v.begin(), v.end());
    auto q = [&](double p) {
        const double pos = p * static_cast<double>(v.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, v.size() - 1);
        const double t = pos - static_cast<double>(lo);
        return v[lo] + t * (v[hi] - v[lo]);
    };
    return {q(0.05), q(0.25), q(0.5), q(0.75), q(0.95)};
}

namespace {

std::vector<LatticeSet> materialize_factors(const ExperimentConfig& cfg)
{
    std::vector<LatticeSet> out;
    for (const auto& s : cfg.sets) {
        out.push_back(materialize(s));
        if (out.back().empty())
            throw ContractError("experiment source set is empty");
    }
    return out;
}

std::size_t ambient_dim(const std::vector<LatticeSet>& factors)
{
    std::size_t d = 0;
    for (const auto& f : factors)
        d += f.dim();
    return d;
}

DimensionSummary summarize(const std::vector<double>& est, double target, double tol)
{
    DimensionSummary s;
    s.quantiles = quantiles(est);
    std::size_t within = 0, above = 0;
    for (double e : est) {
        within += std::abs(e - target) <= tol;
        above += e >= target - tol;
    }
    s.fraction_within = static_cast<double>(within) / static_cast<double>(est.size());
    s.fraction_at_least = static_cast<double>(above) / static_cast<double>(est.size());
    return s;
}

/// Profiles of a product set from its factors: centered cubes and best cubes both split
/// into per-factor cubes of the same side, so counts multiply.
std::pair<ScaleProfile, ScaleProfile> product_profiles(const std::vector<LatticeSet>& factors, const ScaleGrid& grid)
{
    ScaleProfile mass{ProfileKind::mass, {}}, counting{ProfileKind::counting, {}};
    const std::size_t d = ambient_dim(factors);
    for (Coord side : grid.sides()) {
        std::size_t m = 1, c = 1;
        LatticePoint witness;
        for (const auto& f : factors) {
            m *= count_in_cube(f, CenteredCube(side).as_cube(f.dim()));
            auto best = max_count_in_cube(f, side);
            c *= best.count;
            witness.insert(witness.end(), best.witness.base.begin(), best.witness.base.end());
        }
        mass.entries.push_back({side, m, CenteredCube(side).as_cube(d)});
        counting.entries.push_back({side, c, Cube(std::move(witness), side)});
    }
    return {std::move(mass), std::move(counting)};
}

ScaleGrid grid_for_factors(const std::vector<LatticeSet>& factors)
{
    Coord diam = 0;
    for (const auto& f : factors)
        diam = std::max(diam, f.cubic_diameter());
    if (diam < 2)
        throw ContractError("source set is too small for a dyadic grid");
    int j = 1;
    while (j < 62 && (Coord{1} << (j + 1)) <= diam)
        ++j;
    return ScaleGrid::dyadic(1, j);
}

} // namespace

LatticeSet materialize_source(const ExperimentConfig& cfg)
{
    auto factors = materialize_factors(cfg);
    LatticeSet acc = std::move(factors.front());
    for (std::size_t i = 1; i < factors.size(); ++i)
        acc = product(acc, factors[i]);
    return acc;
}

// --- Projection experiment ------------------------------------------------------

McReport run_projection_experiment(const ExperimentConfig& cfg, std::optional<double> target)
{
    if (cfg.samples < 1)
        throw ContractError("experiment needs at least one sample");
    const auto factors = materialize_factors(cfg);
    const std::size_t d = ambient_dim(factors);
    if (cfg.k >= d)
        throw ContractError(fmt::format("projection rank k = {} must be below the ambient dimension {}", cfg.k, d));

    // P_M of a product of 1-D sets onto the first axis is the dilated sumset
    // A_1 + m_1 A_2 + ...; enumerate it directly instead of materializing the product.
    const bool via_sumset = cfg.k == 1 && factors.size() == d && d >= 2;
    LatticeSet source;
    if (!via_sumset)
        source = materialize_source(cfg);

    McReport rep;
    rep.config = to_json(cfg);
    rep.tolerance = cfg.tolerance;

    const ScaleGrid ambient_grid = cfg.scales ? *cfg.scales : grid_for_factors(factors);
    auto [amb_mass, amb_count] = product_profiles(factors, ambient_grid);
    const FitWindow amb_window = top_window(ambient_grid.size(), cfg.window);
    rep.ambient_mass_dim = fit_dimension(amb_mass, amb_window).slope;
    rep.ambient_counting_dim = fit_dimension(amb_count, amb_window).slope;
    rep.inconclusive = std::abs(rep.ambient_mass_dim - rep.ambient_counting_dim) > cfg.tolerance;

    if (target) {
        rep.target = *target;
    } else if (cfg.target) {
        rep.target = *cfg.target;
    } else {
        double closed = 0.0;
        try {
            for (const auto& s : cfg.sets)
                closed += expected_dimension(s);
        } catch (const ContractError&) {
            closed = rep.ambient_mass_dim;
        }
        rep.target = std::min(static_cast<double>(cfg.k), closed);
    }

    rep.per_sample.resize(cfg.samples);
    parallel_for(cfg.samples, cfg.threads, [&](std::size_t i) {
        const auto m = sample_matrix(cfg.k, d, cfg.box, cfg.seed, i);
        SampleRecord rec;
        rec.matrix = m.entries();
        LatticeSet image;
        if (via_sumset) {
            std::vector<double> lambdas{1.0};
            lambdas.insert(lambdas.end(), m.entries().begin(), m.entries().end());
            image = sumset(factors, lambdas);
        } else {
            auto p = project_with_diagnostics(source, m);
            image = std::move(p.set);
            rec.boundary_ties = p.boundary_ties;
        }
        rec.image_size = image.size();
        const ScaleGrid grid = cfg.scales ? *cfg.scales : ScaleGrid::default_for(image);
        rec.sides = grid.sides();
        const FitWindow window = top_window(grid.size(), cfg.window);
        const auto mp = mass_profile(image, grid);
        for (const auto& e : mp.entries)
            rec.mass_counts.push_back(e.count);
        rec.mass_dim = fit_dimension(mp, window).slope;
        if (cfg.counting) {
            const auto cp = counting_profile(image, grid, 1);
            for (const auto& e : cp.entries)
                rec.counting_counts.push_back(e.count);
            rec.counting_dim = fit_dimension(cp, window).slope;
        }
        rep.per_sample[i] = std::move(rec);
    });

    std::vector<double> mass_est, count_est;
    const double cap = std::min(static_cast<double>(cfg.k), rep.ambient_mass_dim) + 0.15;
    for (const auto& r : rep.per_sample) {
        mass_est.push_back(r.mass_dim);
        if (r.counting_dim)
            count_est.push_back(*r.counting_dim);
        if (r.mass_dim > cap)
            ++rep.consistency_violations;
    }
    rep.mass = summarize(mass_est, rep.target, cfg.tolerance);
    if (!count_est.empty())
        rep.counting = summarize(count_est, rep.target, cfg.tolerance);
    return rep;
}

// --- Delta experiment -----------------------------------------------------------

DeltaReport run_delta_experiment(const LatticeSet& set, double alpha, const std::vector<double>& delta_grid,
                                 const ExperimentConfig& cfg)
{
    if (set.empty())
        throw ContractError("delta experiment needs a non-empty set");
    if (alpha == static_cast<double>(cfg.k))
        throw ContractError(fmt::format("delta experiment requires alpha != k (both are {})", alpha));
    if (!(alpha >= 0))
        throw ContractError("alpha must be non-negative");
    if (cfg.samples < 1)
        throw ContractError("experiment needs at least one sample");
    if (delta_grid.empty())
        throw ContractError("delta grid must not be empty");
    if (!std::is_sorted(delta_grid.begin(), delta_grid.end()) || delta_grid.front() < 0)
        throw ContractError("delta grid must be non-negative and increasing");
    const std::size_t d = set.dim();
    if (cfg.k >= d)
        throw ContractError(fmt::format("projection rank k = {} must be below the set dimension {}", cfg.k, d));

    DeltaReport rep;
    rep.config = to_json(cfg);
    rep.alpha = alpha;
    rep.k = cfg.k;
    rep.set_size = set.size();
    rep.cubic_diameter = set.cubic_diameter();
    rep.normalizer = static_cast<double>(set.size()) /
                     std::pow(static_cast<double>(rep.cubic_diameter), std::max(0.0, alpha - static_cast<double>(cfg.k)));

    rep.image_sizes.resize(cfg.samples);
    parallel_for(cfg.samples, cfg.threads, [&](std::size_t i) {
        rep.image_sizes[i] = project(set, sample_matrix(cfg.k, d, cfg.box, cfg.seed, i)).size();
    });

    for (double delta : delta_grid) {
        DeltaRow row;
        row.delta = delta;
        row.threshold = delta * rep.normalizer;
        for (auto s : rep.image_sizes)
            row.below += static_cast<double>(s) < row.threshold;
        row.fraction = static_cast<double>(row.below) / static_cast<double>(cfg.samples);
        row.ratio = delta > 0 ? row.fraction / delta : 0.0;
        rep.max_ratio = std::max(rep.max_ratio, row.ratio);
        if (!rep.rows.empty() && row.fraction < rep.rows.back().fraction)
            rep.monotone = false;
        if (row.ratio > cfg.ratio_bound)
            rep.super_linear = true;
        rep.rows.push_back(row);
    }
    if (rep.rows.size() >= 2) {
        double mx = 0, my = 0;
        for (const auto& r : rep.rows) {
            mx += r.delta;
            my += r.fraction;
        }
        const double n = static_cast<double>(rep.rows.size());
        mx /= n;
        my /= n;
        double sxx = 0, sxy = 0;
        for (const auto& r : rep.rows) {
            sxx += (r.delta - mx) * (r.delta - mx);
            sxy += (r.delta - mx) * (r.fraction - my);
        }
        rep.fit_slope = sxx > 0 ? sxy / sxx : 0.0;
        rep.fit_intercept = my - rep.fit_slope * mx;
    }
    return rep;
}

// --- Serialization --------------------------------------------------------------

namespace {

json to_json(const Quantiles& q)
{
    return {{"q05", q.q05}, {"q25", q.q25}, {"median", q.median}, {"q75", q.q75}, {"q95", q.q95}};
}

json to_json(const DimensionSummary& s)
{
    return {{"quantiles", to_json(s.quantiles)},
            {"fraction_within_tolerance", s.fraction_within},
            {"fraction_at_least_target_minus_tolerance", s.fraction_at_least}};
}

} // namespace

json to_json(const McReport& r)
{
    json samples = json::array();
    for (std::size_t i = 0; i < r.per_sample.size(); ++i) {
        const auto& s = r.per_sample[i];
        json js = {{"index", i},
                   {"matrix", s.matrix},
                   {"image_size", s.image_size},
                   {"boundary_ties", s.boundary_ties},
                   {"sides", s.sides},
                   {"mass_counts", s.mass_counts},
                   {"mass_dim", s.mass_dim}};
        if (s.counting_dim) {
            js["counting_counts"] = s.counting_counts;
            js["counting_dim"] = *s.counting_dim;
        }
        samples.push_back(std::move(js));
    }
    json summary = {{"target", r.target},
                    {"tolerance", r.tolerance},
                    {"sample_count", r.per_sample.size()},
                    {"seed", r.config.value("seed", std::uint64_t{0})},
                    {"ambient_mass_dim", r.ambient_mass_dim},
                    {"ambient_counting_dim", r.ambient_counting_dim},
                    {"inconclusive", r.inconclusive},
                    {"consistency_violations", r.consistency_violations},
                    {"mass", to_json(r.mass)}};
    summary["counting"] = r.counting ? to_json(*r.counting) : json(nullptr);
    return {{"kind", "marstrand"}, {"config", r.config}, {"summary", summary}, {"per_sample", samples}};
}

json to_json(const DeltaReport& r)
{
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"delta", row.delta},
                        {"threshold", row.threshold},
                        {"below", row.below},
                        {"fraction", row.fraction},
                        {"ratio", row.ratio}});
    return {{"kind", "delta"},
            {"config", r.config},
            {"summary",
             {{"alpha", r.alpha},
              {"k", r.k},
              {"set_size", r.set_size},
              {"cubic_diameter", r.cubic_diameter},
              {"normalizer", r.normalizer},
              {"fit_slope", r.fit_slope},
              {"fit_intercept", r.fit_intercept},
              {"max_ratio", r.max_ratio},
              {"monotone", r.monotone},
              {"super_linear", r.super_linear}}},
            {"rows", rows},
            {"image_sizes", r.image_sizes}};
}

void write_samples_csv(std::ostream& out, const McReport& r)
{
    out << "index,matrix,image_size,mass_dim,counting_dim\n";
    for (std::size_t i = 0; i < r.per_sample.size(); ++i) {
        const auto& s = r.per_sample[i];
        std::string m;
        for (std::size_t k = 0; k < s.matrix.size(); ++k)
            m += (k ? ";" : "") + fmt::format("{}", s.matrix[k]);
        out << fmt::format("{},{},{},{},{}\n", i, m, s.image_size, s.mass_dim,
                           s.counting_dim ? fmt::format("{}", *s.counting_dim) : std::string("nan"));
    }
}

void write_delta_csv(std::ostream& out, const DeltaReport& r)
{
    out << "delta,threshold,below,fraction,ratio\n";
    for (const auto& row : r.rows)
        out << fmt::format("{},{},{},{},{}\n", row.delta, row.threshold, row.below, row.fraction, row.ratio);
}

std::string plot_script(const std::string& csv_name, bool delta)
{
    if (delta)
        return fmt::format(R"(import csv
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open("{0}")))
d = [float(r["delta"]) for r in rows]
f = [float(r["fraction"]) for r in rows]
plt.plot(d, f, "o-", label="fraction of projections below threshold")
plt.xlabel("delta")
plt.ylabel("fraction")
plt.legend()
plt.savefig("{0}.png", dpi=120)
)",
                           csv_name);
    return fmt::format(R"(import csv
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open("{0}")))
mass = [float(r["mass_dim"]) for r in rows]
counting = [float(r["counting_dim"]) for r in rows if r["counting_dim"] != "nan"]
plt.hist(mass, bins=30, alpha=0.6, label="mass dimension")
if counting:
    plt.hist(counting, bins=30, alpha=0.6, label="counting dimension")
plt.xlabel("estimated dimension of projection")
plt.ylabel("samples")
plt.legend()
plt.savefig("{0}.png", dpi=120)
)",
                       csv_name);
}

} // namespace latdim
