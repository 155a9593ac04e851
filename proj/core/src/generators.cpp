#include "latdim/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "latdim/checked.hpp"
#include "latdim/error.hpp"
#include "latdim/io.hpp"

namespace latdim {

namespace {

std::int64_t to_int64(const BigInt& v, std::string_view what)
{
    if (v > INT64_MAX || v < INT64_MIN)
        throw RangeError(fmt::format("{} = {} is outside the int64 range", what, v.str()));
    return static_cast<std::int64_t>(v);
}

} // namespace

// --- TransitionMatrix -----------------------------------------------------------

TransitionMatrix::TransitionMatrix(int base, std::vector<std::uint8_t> entries, std::vector<int> start_digits)
    : base_(base), entries_(std::move(entries)), start_(std::move(start_digits))
{
    if (base_ < 1)
        throw ContractError(fmt::format("transition matrix size must be at least 1, got {}", base_));
    if (entries_.size() != static_cast<std::size_t>(base_ * base_))
        throw ContractError(fmt::format("transition matrix for base {} needs {} entries, got {}", base_, base_ * base_,
                                        entries_.size()));
    for (auto& e : entries_) {
        if (e > 1)
            throw ContractError("transition matrix entries must be 0 or 1");
    }
    if (start_.empty()) {
        start_.resize(static_cast<std::size_t>(base_));
        std::iota(start_.begin(), start_.end(), 0);
    }
    std::sort(start_.begin(), start_.end());
    start_.erase(std::unique(start_.begin(), start_.end()), start_.end());
    for (int s : start_)
        if (s < 0 || s >= base_)
            throw ContractError(fmt::format("start digit {} is not a base-{} digit", s, base_));

    // Some start digit must reach a cycle, otherwise admissible strings stop at a bounded length.
    const int b = base_;
    std::vector<char> reach(static_cast<std::size_t>(b), 0);
    std::vector<int> stack(start_.begin(), start_.end());
    for (int s : start_)
        reach[static_cast<std::size_t>(s)] = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v = 0; v < b; ++v)
            if (allowed(u, v) && !reach[static_cast<std::size_t>(v)]) {
                reach[static_cast<std::size_t>(v)] = 1;
                stack.push_back(v);
            }
    }
    // A digit lies on a cycle iff it can reach itself in 1..b steps.
    bool ok = false;
    for (int s = 0; s < b && !ok; ++s) {
        if (!reach[static_cast<std::size_t>(s)])
            continue;
        std::vector<char> seen(static_cast<std::size_t>(b), 0);
        std::vector<int> st{s};
        while (!st.empty() && !ok) {
            int u = st.back();
            st.pop_back();
            for (int v = 0; v < b; ++v) {
                if (!allowed(u, v))
                    continue;
                if (v == s) {
                    ok = true;
                    break;
                }
                if (!seen[static_cast<std::size_t>(v)]) {
                    seen[static_cast<std::size_t>(v)] = 1;
                    st.push_back(v);
                }
            }
        }
    }
    if (!ok)
        throw ContractError("transition matrix admits no cycle reachable from the start digits");
}

TransitionMatrix TransitionMatrix::restricted_digits(int base, const std::vector<int>& digits)
{
    if (base < 2)
        throw ContractError(fmt::format("base must be at least 2, got {}", base));
    std::vector<std::uint8_t> m(static_cast<std::size_t>(base * base), 0);
    for (int i : digits) {
        if (i < 0 || i >= base)
            throw ContractError(fmt::format("digit {} is not a base-{} digit", i, base));
        for (int j : digits)
            m[static_cast<std::size_t>(i * base + j)] = 1;
    }
    return TransitionMatrix(base, std::move(m), digits);
}

bool TransitionMatrix::has_cycle() const
{
    // Kahn's algorithm: a cycle exists iff topological peeling gets stuck.
    const auto b = static_cast<std::size_t>(base_);
    std::vector<int> indeg(b, 0);
    for (std::size_t i = 0; i < b; ++i)
        for (std::size_t j = 0; j < b; ++j)
            indeg[j] += entries_[i * b + j];
    std::vector<std::size_t> queue;
    for (std::size_t j = 0; j < b; ++j)
        if (indeg[j] == 0)
            queue.push_back(j);
    std::size_t removed = 0;
    while (!queue.empty()) {
        auto u = queue.back();
        queue.pop_back();
        ++removed;
        for (std::size_t v = 0; v < b; ++v)
            if (entries_[u * b + v] && --indeg[v] == 0)
                queue.push_back(v);
    }
    return removed < b;
}

// --- IpSpec ---------------------------------------------------------------------

void IpSpec::validate(std::size_t depth) const
{
    if (depth == 0)
        throw ContractError("IP depth must be at least 1");
    if (k.size() < depth || d.size() < depth)
        throw ContractError(fmt::format("IP spec provides {} k and {} d terms; depth {} requested", k.size(), d.size(), depth));
    __int128 partial = 0;
    for (std::size_t i = 0; i < depth; ++i) {
        if (k[i] < 1 || d[i] < 1)
            throw ContractError(fmt::format("IP spec terms must be positive (index {})", i + 1));
        if (i > 0 && static_cast<__int128>(d[i]) <= partial)
            throw ContractError(fmt::format("IP admissibility fails at index {}: d_{} = {} is not greater than "
                                            "sum of k_i d_i over earlier terms",
                                            i + 1, i + 1, d[i]));
        partial += static_cast<__int128>(k[i]) * d[i];
        if (partial > static_cast<__int128>(INT64_MAX))
            throw RangeError(fmt::format("IP partial sum exceeds int64 at index {}", i + 1));
    }
}

IpSpec IpSpec::pow2_family(std::size_t depth)
{
    IpSpec s;
    for (std::size_t i = 1; i <= depth; ++i) {
        if (i * i >= 63)
            throw RangeError(fmt::format("d_{} = 2^{} does not fit in int64", i, i * i));
        s.k.push_back(std::int64_t{1} << i);
        s.d.push_back(std::int64_t{1} << (i * i));
    }
    return s;
}

// --- Generators -----------------------------------------------------------------

LatticeSet polynomial_image(const std::vector<Rational>& coeffs, std::int64_t n_lo, std::int64_t n_hi)
{
    std::size_t degree = 0;
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        if (coeffs[i] != 0)
            degree = i;
    if (degree < 1)
        throw ContractError("polynomial must have degree at least 1");
    if (n_lo >= n_hi)
        throw ContractError(fmt::format("empty evaluation range [{}, {})", n_lo, n_hi));

    BigInt common = 1;
    for (const auto& c : coeffs)
        common = boost::multiprecision::lcm(common, denominator(c));
    std::vector<BigInt> nums;
    nums.reserve(degree + 1);
    for (std::size_t i = 0; i <= degree; ++i)
        nums.push_back(numerator(coeffs[i]) * (common / denominator(coeffs[i])));

    std::vector<Coord> out;
    out.reserve(static_cast<std::size_t>(std::min<std::int64_t>(n_hi - n_lo, 1 << 24)));
    BigInt acc;
    for (std::int64_t n = n_lo; n < n_hi; ++n) {
        acc = nums[degree];
        for (std::size_t i = degree; i-- > 0;) {
            acc *= n;
            acc += nums[i];
        }
        BigInt v = floor_div(acc, common);
        if (v > INT64_MAX || v < INT64_MIN)
            throw RangeError(fmt::format("polynomial value at n = {} is outside the int64 range", n));
        out.push_back(static_cast<Coord>(v));
    }
    std::vector<std::string> cs;
    for (std::size_t i = 0; i <= degree; ++i)
        cs.push_back(to_string(coeffs[i]));
    return LatticeSet::from_flat(1, std::move(out),
                                 fmt::format("polynomial coeffs=[{}] n in [{},{})", fmt::join(cs, ","), n_lo, n_hi));
}

LatticeSet power_sequence(const Rational& beta, std::int64_t n_hi)
{
    if (beta <= 0)
        throw ContractError("power_sequence exponent must be positive");
    if (n_hi < 1)
        throw ContractError("power_sequence upper bound must be at least 1");
    if (numerator(beta) > 1'000'000 || denominator(beta) > 1'000'000)
        throw ContractError("power_sequence exponent numerator/denominator too large");
    const auto p = static_cast<unsigned>(numerator(beta));
    const auto q = static_cast<unsigned>(denominator(beta));
    const double exponent = static_cast<double>(p) / static_cast<double>(q);

    std::vector<Coord> out;
    for (std::int64_t n = 1; n < n_hi; ++n) {
        // floor(n^(p/q)) = largest m with m^q <= n^p; the double only seeds the search.
        const BigInt target = boost::multiprecision::pow(BigInt(n), p);
        BigInt m = 0;
        const double guess = std::floor(std::pow(static_cast<double>(n), exponent));
        if (std::isfinite(guess) && guess < 9.2e18)
            m = BigInt(static_cast<std::int64_t>(guess));
        else
            throw RangeError(fmt::format("floor(n^beta) at n = {} exceeds int64", n));
        while (m > 0 && boost::multiprecision::pow(m, q) > target)
            --m;
        while (boost::multiprecision::pow(BigInt(m + 1), q) <= target)
            ++m;
        out.push_back(to_int64(m, fmt::format("floor(n^beta) at n = {}", n)));
    }
    return LatticeSet::from_flat(1, std::move(out), fmt::format("power beta={} n in [1,{})", to_string(beta), n_hi));
}

LatticeSet geometric(const Rational& ratio, std::int64_t limit)
{
    if (ratio <= 1)
        throw ContractError("geometric ratio must exceed 1");
    std::vector<Coord> out;
    Rational v = ratio;
    while (v <= limit) {
        out.push_back(to_int64(floor_div(numerator(v), denominator(v)), "geometric term"));
        v *= ratio;
    }
    return LatticeSet::from_flat(1, std::move(out), fmt::format("geometric ratio={} limit={}", to_string(ratio), limit));
}

LatticeSet primes(std::int64_t limit)
{
    if (limit < 2)
        throw ContractError(fmt::format("primes limit must be at least 2, got {}", limit));
    const auto n = static_cast<std::size_t>(limit);
    std::vector<bool> composite(n, false);
    std::vector<Coord> out;
    for (std::size_t i = 2; i < n; ++i) {
        if (composite[i])
            continue;
        out.push_back(static_cast<Coord>(i));
        if (i > (n - 1) / i)
            continue;
        for (std::size_t j = i * i; j < n; j += i)
            composite[j] = true;
    }
    return LatticeSet::from_sorted_unique(1, std::move(out), fmt::format("primes below {}", limit));
}

LatticeSet integer_cantor(const TransitionMatrix& tm, int depth)
{
    if (depth < 1)
        throw ContractError("Cantor depth must be at least 1");
    if (tm.base() < 2)
        throw ContractError(fmt::format("Cantor base must be at least 2, got {}", tm.base()));
    const std::int64_t b = tm.base();
    std::int64_t top = 1;
    for (int i = 0; i < depth; ++i)
        top = checked_mul(top, b, fmt::format("base^depth ({}^{})", b, depth));

    struct Str {
        Coord value;
        int last;
    };
    std::vector<Str> level;
    for (int s : tm.start_digits())
        level.push_back({s, s});
    std::vector<Coord> out;
    for (const auto& s : level)
        out.push_back(s.value);
    std::int64_t place = 1;
    for (int n = 1; n < depth; ++n) {
        place *= b;
        std::vector<Str> next;
        for (const auto& s : level)
            for (int j = 0; j < b; ++j)
                if (tm.allowed(s.last, j))
                    next.push_back({s.value + j * place, j});
        level = std::move(next);
        for (const auto& s : level)
            out.push_back(s.value);
    }
    std::vector<std::string> rows;
    for (int i = 0; i < b; ++i) {
        std::string r;
        for (int j = 0; j < b; ++j)
            r += tm.allowed(i, j) ? '1' : '0';
        rows.push_back(r);
    }
    return LatticeSet::from_flat(1, std::move(out),
                                 fmt::format("cantor base={} matrix={} start=[{}] depth={}", b, fmt::join(rows, "/"),
                                             fmt::join(tm.start_digits(), ","), depth));
}

LatticeSet generalized_ip(const IpSpec& spec, std::size_t depth)
{
    spec.validate(depth);
    std::size_t total = 1;
    for (std::size_t i = 0; i < depth; ++i)
        if (__builtin_mul_overflow(total, static_cast<std::size_t>(spec.k[i]), &total))
            throw ResourceError("IP set cardinality overflows");
    std::vector<Coord> out;
    out.reserve(total);
    out.push_back(0);
    // Admissibility makes every earlier sum smaller than d_i, so appending blocks
    // x * d_i + (earlier sums) in increasing x keeps the output sorted and distinct.
    for (std::size_t i = 0; i < depth; ++i) {
        const std::size_t prev = out.size();
        for (std::int64_t x = 1; x < spec.k[i]; ++x) {
            const Coord offset = x * spec.d[i];
            for (std::size_t j = 0; j < prev; ++j)
                out.push_back(out[j] + offset);
        }
    }
    return LatticeSet::from_sorted_unique(1, std::move(out),
                                          fmt::format("ip k=[{}] d=[{}] depth={}",
                                                      fmt::join(spec.k.begin(), spec.k.begin() + static_cast<std::ptrdiff_t>(depth), ","),
                                                      fmt::join(spec.d.begin(), spec.d.begin() + static_cast<std::ptrdiff_t>(depth), ","),
                                                      depth));
}

LatticeSet integer_interval(std::int64_t lo, std::int64_t hi)
{
    if (lo >= hi)
        throw ContractError(fmt::format("empty interval [{}, {})", lo, hi));
    std::vector<Coord> out;
    out.reserve(static_cast<std::size_t>(hi - lo));
    for (std::int64_t v = lo; v < hi; ++v)
        out.push_back(v);
    return LatticeSet::from_sorted_unique(1, std::move(out), fmt::format("interval [{},{})", lo, hi));
}

double perron_frobenius(const TransitionMatrix& tm, PerronFrobeniusOptions opts)
{
    if (!tm.has_cycle())
        throw ContractError("matrix has no cycle; its spectral radius is 0");
    const auto b = static_cast<std::size_t>(tm.base());
    // Iterate with M + I: same Perron vector, eigenvalue shifted by 1, and no
    // oscillation for periodic matrices.
    std::vector<double> v(b, 1.0), w(b);
    double prev = 0.0;
    double lambda = 0.0;
    for (int it = 0; it < opts.max_iter; ++it) {
        for (std::size_t i = 0; i < b; ++i) {
            double s = v[i];
            for (std::size_t j = 0; j < b; ++j)
                if (tm.allowed(static_cast<int>(i), static_cast<int>(j)))
                    s += v[j];
            w[i] = s;
        }
        lambda = *std::max_element(w.begin(), w.end());
        for (std::size_t i = 0; i < b; ++i)
            v[i] = w[i] / lambda;
        if (it > 0 && std::abs(lambda - prev) <= opts.rel_tol * lambda)
            return lambda - 1.0;
        prev = lambda;
    }
    throw NumericError(fmt::format("power iteration did not converge in {} iterations (last iterates {:.17g}, {:.17g})",
                                   opts.max_iter, prev - 1.0, lambda - 1.0));
}

// --- Specs ----------------------------------------------------------------------

LatticeSet materialize(const GeneratorSpec& spec, std::size_t product_cap)
{
    return std::visit(
        [&](const auto& s) -> LatticeSet {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, PolynomialSpec>)
                return polynomial_image(s.coeffs, s.n_lo, s.n_hi);
            else if constexpr (std::is_same_v<T, PowerSpec>)
                return power_sequence(s.beta, s.n_hi);
            else if constexpr (std::is_same_v<T, GeometricSpec>)
                return geometric(s.ratio, s.limit);
            else if constexpr (std::is_same_v<T, PrimesSpec>)
                return primes(s.limit);
            else if constexpr (std::is_same_v<T, IntervalSpec>)
                return integer_interval(s.lo, s.hi);
            else if constexpr (std::is_same_v<T, CantorSpec>)
                return integer_cantor(s.matrix, s.depth);
            else if constexpr (std::is_same_v<T, IpGenSpec>)
                return generalized_ip(s.spec, s.depth);
            else if constexpr (std::is_same_v<T, FileSpec>)
                return io::read_set(std::filesystem::path(s.path));
            else {
                if (s.factors.empty())
                    throw ContractError("product spec needs at least one factor");
                LatticeSet acc = materialize(s.factors.front(), product_cap);
                for (std::size_t i = 1; i < s.factors.size(); ++i)
                    acc = product(acc, materialize(s.factors[i], product_cap), product_cap);
                return acc;
            }
        },
        spec.family);
}

double expected_dimension(const GeneratorSpec& spec)
{
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, PolynomialSpec>) {
                std::size_t degree = 0;
                for (std::size_t i = 0; i < s.coeffs.size(); ++i)
                    if (s.coeffs[i] != 0)
                        degree = i;
                if (degree < 1)
                    throw ContractError("polynomial must have degree at least 1");
                return 1.0 / static_cast<double>(degree);
            } else if constexpr (std::is_same_v<T, PowerSpec>) {
                return std::min(1.0, 1.0 / static_cast<double>(s.beta));
            } else if constexpr (std::is_same_v<T, GeometricSpec>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, PrimesSpec> || std::is_same_v<T, IntervalSpec>) {
                return 1.0;
            } else if constexpr (std::is_same_v<T, CantorSpec>) {
                return std::log(perron_frobenius(s.matrix)) / std::log(static_cast<double>(s.matrix.base()));
            } else if constexpr (std::is_same_v<T, IpGenSpec>) {
                s.spec.validate(s.depth);
                double best = 0.0;
                double log_prod = 0.0;
                const std::size_t from = (s.depth + 1) / 2;
                for (std::size_t n = 1; n <= s.depth; ++n) {
                    log_prod += std::log(static_cast<double>(s.spec.k[n - 1]));
                    const double denom = std::log(static_cast<double>(s.spec.k[n - 1])) +
                                         std::log(static_cast<double>(s.spec.d[n - 1]));
                    if (n >= from && denom > 0)
                        best = std::max(best, log_prod / denom);
                }
                return best;
            } else if constexpr (std::is_same_v<T, FileSpec>) {
                throw ContractError("no closed-form dimension for a set read from a file");
            } else {
                double sum = 0.0;
                for (const auto& f : s.factors)
                    sum += expected_dimension(f);
                return sum;
            }
        },
        spec.family);
}

namespace {

Rational rational_from_json(const nlohmann::json& j)
{
    if (j.is_string())
        return parse_rational(j.get<std::string>());
    if (j.is_number_integer())
        return Rational(j.get<std::int64_t>());
    if (j.is_number_float())
        return parse_rational(fmt::format("{}", j.get<double>()));
    throw ContractError(fmt::format("expected a rational, got {}", j.dump()));
}

} // namespace

GeneratorSpec generator_spec_from_json(const nlohmann::json& j)
{
    if (!j.is_object() || !j.contains("family"))
        throw ContractError(fmt::format("generator spec needs a \"family\" field: {}", j.dump()));
    const auto family = j.at("family").get<std::string>();
    try {
        if (family == "polynomial") {
            PolynomialSpec s;
            for (const auto& c : j.at("coeffs"))
                s.coeffs.push_back(rational_from_json(c));
            s.n_lo = j.value("from", std::int64_t{0});
            s.n_hi = j.at("to").get<std::int64_t>();
            return {s};
        }
        if (family == "power")
            return {PowerSpec{rational_from_json(j.at("beta")), j.at("to").get<std::int64_t>()}};
        if (family == "geometric")
            return {GeometricSpec{rational_from_json(j.at("ratio")), j.at("limit").get<std::int64_t>()}};
        if (family == "primes")
            return {PrimesSpec{j.at("limit").get<std::int64_t>()}};
        if (family == "interval")
            return {IntervalSpec{j.value("from", std::int64_t{0}), j.at("to").get<std::int64_t>()}};
        if (family == "cantor") {
            const int base = j.at("base").get<int>();
            const int depth = j.at("depth").get<int>();
            if (j.contains("matrix")) {
                std::vector<std::uint8_t> m;
                for (const auto& row : j.at("matrix"))
                    for (const auto& e : row)
                        m.push_back(static_cast<std::uint8_t>(e.get<int>()));
                std::vector<int> start = j.value("start", std::vector<int>{});
                return {CantorSpec{TransitionMatrix(base, std::move(m), std::move(start)), depth}};
            }
            auto digits = j.at("digits").get<std::vector<int>>();
            auto tm = TransitionMatrix::restricted_digits(base, digits);
            if (j.contains("start"))
                tm = TransitionMatrix(base, tm.entries(), j.at("start").get<std::vector<int>>());
            return {CantorSpec{std::move(tm), depth}};
        }
        if (family == "ip") {
            const auto depth = j.at("depth").get<std::size_t>();
            if (j.value("preset", std::string{}) == "pow2")
                return {IpGenSpec{IpSpec::pow2_family(depth), depth}};
            IpSpec s{j.at("k").get<std::vector<std::int64_t>>(), j.at("d").get<std::vector<std::int64_t>>()};
            s.validate(depth);
            return {IpGenSpec{std::move(s), depth}};
        }
        if (family == "file")
            return {FileSpec{j.at("path").get<std::string>()}};
        if (family == "product") {
            ProductSpec p;
            for (const auto& f : j.at("factors"))
                p.factors.push_back(generator_spec_from_json(f));
            return {std::move(p)};
        }
    } catch (const nlohmann::json::exception& e) {
        throw ContractError(fmt::format("bad {} spec {}: {}", family, j.dump(), e.what()));
    }
    throw ContractError(fmt::format("unknown generator family '{}'", family));
}

nlohmann::json to_json(const GeneratorSpec& spec)
{
    return std::visit(
        [](const auto& s) -> nlohmann::json {
            using T = std::decay_t<decltype(s)>;
            using nlohmann::json;
            if constexpr (std::is_same_v<T, PolynomialSpec>) {
                json cs = json::array();
                for (const auto& c : s.coeffs)
                    cs.push_back(to_string(c));
                return {{"family", "polynomial"}, {"coeffs", cs}, {"from", s.n_lo}, {"to", s.n_hi}};
            } else if constexpr (std::is_same_v<T, PowerSpec>) {
                return {{"family", "power"}, {"beta", to_string(s.beta)}, {"to", s.n_hi}};
            } else if constexpr (std::is_same_v<T, GeometricSpec>) {
                return {{"family", "geometric"}, {"ratio", to_string(s.ratio)}, {"limit", s.limit}};
            } else if constexpr (std::is_same_v<T, PrimesSpec>) {
                return {{"family", "primes"}, {"limit", s.limit}};
            } else if constexpr (std::is_same_v<T, IntervalSpec>) {
                return {{"family", "interval"}, {"from", s.lo}, {"to", s.hi}};
            } else if constexpr (std::is_same_v<T, CantorSpec>) {
                const int b = s.matrix.base();
                json rows = json::array();
                for (int i = 0; i < b; ++i) {
                    json row = json::array();
                    for (int k = 0; k < b; ++k)
                        row.push_back(s.matrix.allowed(i, k) ? 1 : 0);
                    rows.push_back(row);
                }
                return {{"family", "cantor"}, {"base", b}, {"matrix", rows}, {"start", s.matrix.start_digits()},
                        {"depth", s.depth}};
            } else if constexpr (std::is_same_v<T, IpGenSpec>) {
                return {{"family", "ip"}, {"k", s.spec.k}, {"d", s.spec.d}, {"depth", s.depth}};
            } else if constexpr (std::is_same_v<T, FileSpec>) {
                return {{"family", "file"}, {"path", s.path}};
            } else {
                json fs = json::array();
                for (const auto& f : s.factors)
                    fs.push_back(to_json(f));
                return {{"family", "product"}, {"factors", fs}};
            }
        },
        spec.family);
}

} // namespace latdim
