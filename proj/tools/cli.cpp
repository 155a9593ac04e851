#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "latdim/covering.hpp"
#include "latdim/dimension.hpp"
#include "latdim/error.hpp"
#include "latdim/generators.hpp"
#include "latdim/io.hpp"
#include "latdim/montecarlo.hpp"
#include "latdim/projection.hpp"

namespace latdim::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        out.push_back(cur);
    return out;
}

template <class T>
std::vector<T> parse_list(const std::string& s, const char* what)
{
    std::vector<T> out;
    for (const auto& tok : split(s, ',')) {
        try {
            std::size_t used = 0;
            if constexpr (std::is_same_v<T, double>)
                out.push_back(std::stod(tok, &used));
            else
                out.push_back(static_cast<T>(std::stoll(tok, &used)));
            if (used != tok.size())
                throw std::invalid_argument(tok);
        } catch (const std::logic_error&) {
            throw CLI::ValidationError(what, fmt::format("'{}' is not a valid number", tok));
        }
    }
    if (out.empty())
        throw CLI::ValidationError(what, "empty list");
    return out;
}

Cube parse_cube(const std::string& s)
{
    auto v = parse_list<Coord>(s, "--cube");
    if (v.size() < 2)
        throw CLI::ValidationError("--cube", "expected base coordinates followed by the side, e.g. 0,100");
    const Coord side = v.back();
    v.pop_back();
    return Cube(std::move(v), side);
}

unsigned resolve_cli_threads(const std::optional<unsigned>& flag)
{
    if (flag)
        return *flag;
    if (const char* env = std::getenv("LATDIM_THREADS")) {
        try {
            return static_cast<unsigned>(std::stoul(env));
        } catch (const std::logic_error&) {
            throw CLI::ValidationError("LATDIM_THREADS", fmt::format("'{}' is not a thread count", env));
        }
    }
    return 0;
}

/// Writes via `fn` either to the file at `path` or to `out`.
void emit(const std::string& path, std::ostream& out, const std::function<void(std::ostream&)>& fn)
{
    if (path.empty() || path == "-") {
        fn(out);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw ContractError(fmt::format("cannot write {}", path));
    fn(f);
}

std::string fmt_double(double v) { return fmt::format("{}", v); }

json command_echo(const std::string& name, const std::vector<std::string>& args)
{
    json a = json::array();
    for (const auto& s : args)
        a.push_back(s);
    return {{"command", name}, {"argv", a}};
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"latdim: discrete fractal dimensions of integer lattice sets"};
    app.require_subcommand(1);
    app.fallthrough();
    std::optional<unsigned> threads_flag;
    app.add_option("--threads", threads_flag, "worker threads (0 = auto; falls back to LATDIM_THREADS)");

    std::string out_path;
    std::function<void()> action;
    const json echo = command_echo("latdim", args);

    // gen ------------------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "generate an example set as JSONL");
    gen->require_subcommand(1);
    auto emit_set = [&](const GeneratorSpec& spec) {
        const auto set = materialize(spec);
        emit(out_path, out, [&](std::ostream& o) { io::write_set(o, set, {{"spec", to_json(spec)}}); });
    };

    std::string coeffs;
    std::int64_t from = 0, to = 0;
    auto* g_poly = gen->add_subcommand("polynomial", "{floor(f(n)) : from <= n < to}");
    g_poly->add_option("--coeffs", coeffs, "coefficients in ascending degree, e.g. 0,0,1 or 1/2,0,1")->required();
    g_poly->add_option("--from", from);
    g_poly->add_option("--to", to)->required();
    g_poly->add_option("-o,--output", out_path);
    g_poly->callback([&] {
        action = [&] {
            PolynomialSpec s;
            for (const auto& c : split(coeffs, ','))
                s.coeffs.push_back(parse_rational(c));
            s.n_lo = from;
            s.n_hi = to;
            emit_set({s});
        };
    });

    std::string rational_arg;
    std::int64_t limit = 0;
    auto* g_power = gen->add_subcommand("power", "{floor(n^beta) : 1 <= n < to}");
    g_power->add_option("--beta", rational_arg, "positive rational exponent, e.g. 3/2")->required();
    g_power->add_option("--to", to)->required();
    g_power->add_option("-o,--output", out_path);
    g_power->callback([&] { action = [&] { emit_set({PowerSpec{parse_rational(rational_arg), to}}); }; });

    auto* g_geo = gen->add_subcommand("geometric", "{floor(r^n) : n >= 1, r^n <= limit}");
    g_geo->add_option("--ratio", rational_arg, "rational ratio > 1")->required();
    g_geo->add_option("--limit", limit)->required();
    g_geo->add_option("-o,--output", out_path);
    g_geo->callback([&] { action = [&] { emit_set({GeometricSpec{parse_rational(rational_arg), limit}}); }; });

    auto* g_primes = gen->add_subcommand("primes", "primes below the limit");
    g_primes->add_option("--limit", limit)->required();
    g_primes->add_option("-o,--output", out_path);
    g_primes->callback([&] { action = [&] { emit_set({PrimesSpec{limit}}); }; });

    auto* g_interval = gen->add_subcommand("interval", "the integers in [from, to)");
    g_interval->add_option("--from", from);
    g_interval->add_option("--to", to)->required();
    g_interval->add_option("-o,--output", out_path);
    g_interval->callback([&] { action = [&] { emit_set({IntervalSpec{from, to}}); }; });

    int base = 0, depth = 0;
    std::string digits, matrix_rows, start;
    auto* g_cantor = gen->add_subcommand("cantor", "integer Cantor set from a digit transition matrix");
    g_cantor->add_option("--base", base)->required();
    g_cantor->add_option("--depth", depth, "maximum number of digits")->required();
    auto* o_digits = g_cantor->add_option("--digits", digits, "allowed digits, all transitions among them allowed");
    auto* o_matrix = g_cantor->add_option("--matrix", matrix_rows, "0/1 rows separated by ';', e.g. \"1,1;1,0\"");
    o_digits->excludes(o_matrix);
    g_cantor->add_option("--start", start, "digits allowed in the least significant place");
    g_cantor->add_option("-o,--output", out_path);
    g_cantor->callback([&] {
        if (digits.empty() && matrix_rows.empty())
            throw CLI::RequiredError("--digits or --matrix");
        action = [&] {
            std::vector<int> st;
            if (!start.empty())
                for (auto v : parse_list<long long>(start, "--start"))
                    st.push_back(static_cast<int>(v));
            if (!digits.empty()) {
                std::vector<int> ds;
                for (auto v : parse_list<long long>(digits, "--digits"))
                    ds.push_back(static_cast<int>(v));
                auto tm = TransitionMatrix::restricted_digits(base, ds);
                if (!st.empty())
                    tm = TransitionMatrix(base, tm.entries(), st);
                emit_set({CantorSpec{std::move(tm), depth}});
            } else {
                std::vector<std::uint8_t> m;
                for (const auto& row : split(matrix_rows, ';'))
                    for (auto v : parse_list<long long>(row, "--matrix"))
                        m.push_back(static_cast<std::uint8_t>(v));
                emit_set({CantorSpec{TransitionMatrix(base, std::move(m), st), depth}});
            }
        };
    });

    std::string ip_k, ip_d, preset;
    std::size_t ip_depth = 0;
    auto* g_ip = gen->add_subcommand("ip", "generalized IP set of finite sums x_1 d_1 + ... + x_n d_n");
    g_ip->add_option("--k", ip_k, "digit caps k_1,k_2,...");
    g_ip->add_option("--d", ip_d, "gaps d_1,d_2,...");
    g_ip->add_option("--preset", preset, "'pow2' for k_i = 2^i, d_i = 2^(i^2)")->check(CLI::IsMember({"pow2"}));
    g_ip->add_option("--depth", ip_depth)->required();
    g_ip->add_option("-o,--output", out_path);
    g_ip->callback([&] {
        if (preset.empty() && (ip_k.empty() || ip_d.empty()))
            throw CLI::RequiredError("--preset or both --k and --d");
        action = [&] {
            IpSpec s = preset == "pow2" ? IpSpec::pow2_family(ip_depth)
                                        : IpSpec{parse_list<std::int64_t>(ip_k, "--k"), parse_list<std::int64_t>(ip_d, "--d")};
            s.validate(ip_depth);
            emit_set({IpGenSpec{std::move(s), ip_depth}});
        };
    });

    std::vector<std::string> inputs;
    std::size_t cap = default_product_cap;
    auto* g_prod = gen->add_subcommand("product", "Cartesian product of set files");
    g_prod->add_option("sets", inputs, "input sets")->required()->check(CLI::ExistingFile)->expected(2, -1);
    g_prod->add_option("--cap", cap, "maximum product cardinality");
    g_prod->add_option("-o,--output", out_path);
    g_prod->callback([&] {
        action = [&] {
            LatticeSet acc = io::read_set(fs::path(inputs[0]));
            for (std::size_t i = 1; i < inputs.size(); ++i)
                acc = product(acc, io::read_set(fs::path(inputs[i])), cap);
            emit(out_path, out, [&](std::ostream& o) { io::write_set(o, acc, {{"spec", echo}}); });
        };
    });

    // dim ------------------------------------------------------------------------
    std::string set_path, scales;
    std::vector<double> alphas;
    std::optional<std::size_t> window;
    auto* dim = app.add_subcommand("dim", "scale profile and dimension estimate");
    dim->require_subcommand(1);
    auto dim_action = [&](ProfileKind kind) {
        const auto set = io::read_set(fs::path(set_path));
        const ScaleGrid grid = scales.empty() ? ScaleGrid::default_for(set) : ScaleGrid::parse(scales);
        const unsigned threads = resolve_cli_threads(threads_flag);
        const ScaleProfile prof = kind == ProfileKind::counting ? counting_profile(set, grid, threads) : mass_profile(set, grid);
        const FitWindow w = top_window(grid.size(), window);
        const DimensionEstimate est = fit_dimension(prof, w);
        emit(out_path, out, [&](std::ostream& o) {
            o << "side,count,exponent\n";
            for (std::size_t i = 0; i < prof.entries.size(); ++i)
                o << fmt::format("{},{},{}\n", prof.entries[i].side, prof.entries[i].count, est.per_scale[i]);
        });
        json sups = json::object();
        for (double a : alphas)
            sups[fmt_double(a)] = measure_sup(prof, a);
        json witnesses = json::array();
        for (const auto& e : prof.entries)
            witnesses.push_back({{"base", e.witness.base}, {"side", e.witness.side}});
        json summary = {{"kind", kind == ProfileKind::counting ? "counting" : "mass"},
                        {"set", set.provenance()},
                        {"points", set.size()},
                        {"scales", grid.size()},
                        {"slope", est.slope},
                        {"intercept", est.intercept},
                        {"window", {w.first, w.last}},
                        {"residual", est.residual},
                        {"sup_values", sups},
                        {"witnesses", witnesses},
                        {"invocation", echo}};
        out << summary.dump() << '\n';
    };
    for (auto [name, kind] : {std::pair{"counting", ProfileKind::counting}, std::pair{"mass", ProfileKind::mass}}) {
        auto* sub = dim->add_subcommand(name, kind == ProfileKind::counting ? "max count over cubes of each side"
                                                                             : "count in centered cubes [-l, l)^d");
        sub->add_option("set", set_path, "input set (JSONL or plain text)")->required()->check(CLI::ExistingFile);
        sub->add_option("--scales", scales, "pow2:a..b or a comma-separated list of sides");
        sub->add_option("--alpha", alphas, "report the measure supremum at this exponent (repeatable)");
        sub->add_option("--window", window, "number of largest scales used in the fit (default: half)");
        sub->add_option("-o,--output", out_path, "CSV destination (summary still goes to stdout)");
        sub->callback([&, kind = kind] { action = [&, kind] { dim_action(kind); }; });
    }

    // cover ----------------------------------------------------------------------
    std::string cube_arg;
    double alpha = 0.0, ratio = 0.0;
    bool force_greedy = false;
    auto* cover = app.add_subcommand("cover", "minimum-cost cover of A ∩ C");
    cover->add_option("set", set_path)->required()->check(CLI::ExistingFile);
    cover->add_option("--cube", cube_arg, "base coordinates then side, e.g. 0,100 or 0,0,8")->required();
    cover->add_option("--alpha", alpha)->required();
    cover->add_option("--ratio", ratio, "ratio cap r in (0, 1]")->required();
    cover->add_flag("--greedy", force_greedy, "use dyadic merging even in dimension 1");
    cover->add_option("-o,--output", out_path);
    cover->callback([&] {
        action = [&] {
            const auto set = io::read_set(fs::path(set_path));
            const Cube c = parse_cube(cube_arg);
            const auto inside = restrict_to(set, c);
            const bool greedy = force_greedy || set.dim() > 1;
            const auto sol = greedy ? greedy_cover_nd(inside, c, alpha, ratio) : optimal_cover_1d(inside, c, alpha, ratio);
            emit(out_path, out, [&](std::ostream& o) {
                for (const auto& q : sol.cubes)
                    o << json{{"base", q.base}, {"side", q.side}}.dump() << '\n';
                o << json{{"cost", sol.cost},
                          {"alpha", alpha},
                          {"ratio", ratio},
                          {"cubes", sol.cubes.size()},
                          {"points", inside.size()},
                          {"method", greedy ? "greedy" : "dp"}}
                         .dump()
                  << '\n';
            });
        };
    });

    // covdim ---------------------------------------------------------------------
    std::string alpha_grid = "0:1:0.05", ratios_arg = "0.25,0.0625,0.015625";
    double tau = 0.05;
    auto* covdim = app.add_subcommand("covdim", "covering-dimension estimate and cost table");
    covdim->add_option("set", set_path)->required()->check(CLI::ExistingFile);
    covdim->add_option("--alphas", alpha_grid, "lo:hi:step")->capture_default_str();
    covdim->add_option("--ratios", ratios_arg, "decreasing ratio caps")->capture_default_str();
    covdim->add_option("--scales", scales);
    covdim->add_option("--window", window);
    covdim->add_option("--tau", tau, "cost level for the threshold estimate")->capture_default_str();
    covdim->add_option("-o,--output", out_path, "CSV destination (summary still goes to stdout)");
    covdim->callback([&] {
        action = [&] {
            const auto set = io::read_set(fs::path(set_path));
            const ScaleGrid grid = scales.empty() ? ScaleGrid::default_for(set) : ScaleGrid::parse(scales);
            CovdimOptions opts;
            opts.alphas = parse_alpha_grid(alpha_grid);
            opts.ratios = parse_list<double>(ratios_arg, "--ratios");
            opts.window = window;
            opts.tau = tau;
            opts.threads = resolve_cli_threads(threads_flag);
            const auto res = covering_dimension_estimate(set, grid, opts);
            emit(out_path, out, [&](std::ostream& o) {
                o << "alpha,side,ratio,cost\n";
                for (const auto& r : res.table)
                    o << fmt::format("{},{},{},{}\n", r.alpha, r.side, r.ratio, r.cost);
            });
            json decay = json::array();
            for (std::size_t i = 0; i < opts.alphas.size(); ++i)
                decay.push_back({{"alpha", opts.alphas[i]}, {"scale_decay", res.decay[i]}, {"ratio_decay", res.ratio_decay[i]}, {"balance", res.balance[i]}});
            json summary = {{"estimate", res.estimate},
                            {"saturated", res.saturated},
                            {"ratio_used", res.ratio_used},
                            {"window", {res.window.first, res.window.last}},
                            {"tau", tau},
                            {"exponents", decay},
                            {"invocation", echo}};
            summary["threshold_estimate"] = res.threshold_estimate ? json(*res.threshold_estimate) : json(nullptr);
            out << summary.dump() << '\n';
        };
    });

    // project / sumset / energy ----------------------------------------------------
    std::string matrix_arg;
    auto* proj = app.add_subcommand("project", "floor of the oblique projection x + M y");
    proj->add_option("set", set_path)->required()->check(CLI::ExistingFile);
    proj->add_option("--matrix", matrix_arg, "k rows of d-k entries, rows separated by ';'")->required();
    proj->add_option("-o,--output", out_path);
    proj->callback([&] {
        action = [&] {
            const auto set = io::read_set(fs::path(set_path));
            const auto m = ProjectionMatrix::parse(matrix_arg);
            const auto p = project_with_diagnostics(set, m);
            emit(out_path, out, [&](std::ostream& o) {
                io::write_set(o, p.set.with_provenance(fmt::format("project({}) matrix={}", set.provenance(), matrix_arg)),
                              {{"boundary_ties", p.boundary_ties}, {"spec", echo}});
            });
        };
    });

    std::string lambdas_arg;
    std::size_t sum_cap = default_sumset_cap;
    auto* sum = app.add_subcommand("sumset", "floor(lambda_1 a_1 + ... + lambda_n a_n) over 1-D sets");
    sum->add_option("sets", inputs)->required()->check(CLI::ExistingFile);
    sum->add_option("--lambdas", lambdas_arg)->required();
    sum->add_option("--cap", sum_cap, "maximum number of sums enumerated");
    sum->add_option("-o,--output", out_path);
    sum->callback([&] {
        action = [&] {
            std::vector<LatticeSet> sets;
            for (const auto& p : inputs)
                sets.push_back(io::read_set(fs::path(p)));
            const auto lambdas = parse_list<double>(lambdas_arg, "--lambdas");
            const auto s = sumset(sets, lambdas, sum_cap);
            emit(out_path, out, [&](std::ostream& o) {
                io::write_set(o, s.with_provenance(fmt::format("sumset lambdas={}", lambdas_arg)), {{"spec", echo}});
            });
        };
    });

    bool as_json = false;
    auto* energy = app.add_subcommand("energy", "representation counts and additive energy of a projection");
    energy->add_option("set", set_path)->required()->check(CLI::ExistingFile);
    energy->add_option("--matrix", matrix_arg)->required();
    energy->add_flag("--json", as_json);
    energy->callback([&] {
        action = [&] {
            const auto set = io::read_set(fs::path(set_path));
            const auto r = additive_energy(set, ProjectionMatrix::parse(matrix_arg));
            const bool cs = cauchy_schwarz_holds(r);
            if (as_json)
                out << json{{"set_size", r.set_size},
                            {"image_size", r.image_size},
                            {"energy", r.energy},
                            {"cauchy_schwarz", cs},
                            {"rep_counts", r.rep_counts}}
                           .dump()
                    << '\n';
            else
                out << fmt::format("set_size={} image_size={} energy={} cauchy_schwarz={}\n", r.set_size, r.image_size,
                                   r.energy, cs ? "ok" : "VIOLATED");
        };
    });

    // regular --------------------------------------------------------------------
    auto* regular = app.add_subcommand("regular", "extract a subset with bracketed alpha-counting supremum");
    regular->add_option("set", set_path)->required()->check(CLI::ExistingFile);
    regular->add_option("--cube", cube_arg, "container cube: base coordinates then side")->required();
    regular->add_option("--alpha", alpha)->required();
    regular->add_option("-o,--output", out_path);
    regular->callback([&] {
        action = [&] {
            const auto set = io::read_set(fs::path(set_path));
            const auto r = extract_regular_subset(set, parse_cube(cube_arg), alpha);
            emit(out_path, out, [&](std::ostream& o) {
                io::write_set(o, r.subset.with_provenance(fmt::format("regular subset of {}", set.provenance())),
                              {{"cube", {{"base", r.cube.base}, {"side", r.cube.side}}},
                               {"sup_value", r.sup_value},
                               {"S", r.s_value},
                               {"alpha", alpha}});
            });
        };
    });

    // mc -------------------------------------------------------------------------
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<double> mc_alpha;
    auto* mc = app.add_subcommand("mc", "Monte Carlo projection experiments");
    mc->require_subcommand(1);
    auto load_config = [&] {
        std::ifstream f(config_path);
        if (!f)
            throw ContractError(fmt::format("cannot open {}", config_path));
        json j;
        try {
            j = json::parse(f);
        } catch (const json::parse_error& e) {
            throw ContractError(fmt::format("{}: {}", config_path, e.what()));
        }
        auto cfg = config_from_json(j);
        if (seed)
            cfg.seed = *seed;
        cfg.threads = resolve_cli_threads(threads_flag);
        return cfg;
    };
    auto write_report = [&](const json& report, const std::function<void(std::ostream&)>& csv, bool delta) {
        if (out_path.empty() || out_path == "-") {
            out << report.dump(2) << '\n';
            return;
        }
        emit(out_path, out, [&](std::ostream& o) { o << report.dump(2) << '\n'; });
        const fs::path p(out_path);
        const fs::path csv_path = fs::path(p).replace_extension(".csv");
        emit(csv_path.string(), out, csv);
        const fs::path script = p.parent_path() / (p.stem().string() + "_plot.py");
        emit(script.string(), out, [&](std::ostream& o) { o << plot_script(csv_path.filename().string(), delta); });
    };
    auto* mc_m = mc->add_subcommand("marstrand", "dimension of random projections of the source set");
    mc_m->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
    mc_m->add_option("--seed", seed, "overrides the config seed");
    mc_m->add_option("-o,--output", out_path, "report JSON; CSV and plot script are written alongside");
    mc_m->callback([&] {
        action = [&] {
            const auto cfg = load_config();
            const auto rep = run_projection_experiment(cfg);
            write_report(to_json(rep), [&](std::ostream& o) { write_samples_csv(o, rep); }, false);
        };
    });
    auto* mc_d = mc->add_subcommand("delta", "fraction of projections that shrink the set below delta |E| / ||E||^(alpha-k)");
    mc_d->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
    mc_d->add_option("--seed", seed, "overrides the config seed");
    mc_d->add_option("--alpha", mc_alpha, "overrides the config alpha");
    mc_d->add_option("-o,--output", out_path, "report JSON; CSV and plot script are written alongside");
    mc_d->callback([&] {
        action = [&] {
            auto cfg = load_config();
            if (mc_alpha)
                cfg.alpha = *mc_alpha;
            if (!cfg.alpha)
                throw ContractError("delta experiment needs an alpha (config \"alpha\" or --alpha)");
            std::vector<double> grid = cfg.delta_grid;
            if (grid.empty())
                for (int i = 1; i <= 10; ++i)
                    grid.push_back(0.05 * i);
            const auto set = materialize_source(cfg);
            const auto rep = run_delta_experiment(set, *cfg.alpha, grid, cfg);
            write_report(to_json(rep), [&](std::ostream& o) { write_delta_csv(o, rep); }, true);
        };
    });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (!action)
            throw ContractError("no action selected");
        action();
    } catch (const CLI::Error& e) {
        err << "latdim: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "latdim: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "latdim: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace latdim::cli
