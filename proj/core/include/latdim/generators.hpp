#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "latdim/lattice.hpp"
#include "latdim/rational.hpp"

namespace latdim {

/// Binary digit-transition matrix for integer Cantor sets, plus the digits allowed
/// in the least significant position.
class TransitionMatrix {
public:
    /// `entries` is row-major b x b with 0/1 values; empty `start_digits` means all digits.
    TransitionMatrix(int base, std::vector<std::uint8_t> entries, std::vector<int> start_digits = {});

    /// All transitions among `digits` allowed; start digits default to `digits`.
    static TransitionMatrix restricted_digits(int base, const std::vector<int>& digits);

    int base() const { return base_; }
    bool allowed(int from, int to) const { return entries_[static_cast<std::size_t>(from * base_ + to)] != 0; }
    const std::vector<std::uint8_t>& entries() const { return entries_; }
    const std::vector<int>& start_digits() const { return start_; }
    /// True when the digit graph has a cycle anywhere (spectral radius >= 1).
    bool has_cycle() const;

private:
    int base_;
    std::vector<std::uint8_t> entries_;
    std::vector<int> start_;
};

/// Digit caps k_n and gaps d_n of a generalized IP set.
struct IpSpec {
    std::vector<std::int64_t> k;
    std::vector<std::int64_t> d;

    /// Checks positivity and d_{n+1} > sum_{i<=n} k_i d_i up to `depth`.
    void validate(std::size_t depth) const;
    /// k_i = 2^i, d_i = 2^(i^2) for i = 1..depth.
    static IpSpec pow2_family(std::size_t depth);
};

LatticeSet polynomial_image(const std::vector<Rational>& coeffs, std::int64_t n_lo, std::int64_t n_hi);
LatticeSet power_sequence(const Rational& beta, std::int64_t n_hi);
LatticeSet geometric(const Rational& ratio, std::int64_t limit);
LatticeSet primes(std::int64_t limit);
LatticeSet integer_cantor(const TransitionMatrix& tm, int depth);
LatticeSet generalized_ip(const IpSpec& spec, std::size_t depth);
LatticeSet integer_interval(std::int64_t lo, std::int64_t hi);

struct PerronFrobeniusOptions {
    double rel_tol = 1e-12;
    int max_iter = 100'000;
};
double perron_frobenius(const TransitionMatrix& tm, PerronFrobeniusOptions opts = {});

// Generator specifications: the serializable description of a set, shared by the CLI
// and experiment configs.

struct PolynomialSpec {
    std::vector<Rational> coeffs; ///< ascending degree
    std::int64_t n_lo = 0;
    std::int64_t n_hi = 0;
};
struct PowerSpec {
    Rational beta;
    std::int64_t n_hi = 0;
};
struct GeometricSpec {
    Rational ratio;
    std::int64_t limit = 0;
};
struct PrimesSpec {
    std::int64_t limit = 0;
};
struct IntervalSpec {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
};
struct CantorSpec {
    TransitionMatrix matrix;
    int depth = 1;
};
struct IpGenSpec {
    IpSpec spec;
    std::size_t depth = 1;
};
struct FileSpec {
    std::string path;
};
struct GeneratorSpec;
struct ProductSpec {
    std::vector<GeneratorSpec> factors;
};

struct GeneratorSpec {
    std::variant<PolynomialSpec, PowerSpec, GeometricSpec, PrimesSpec, IntervalSpec, CantorSpec, IpGenSpec,
                 FileSpec, ProductSpec>
        family;
};

LatticeSet materialize(const GeneratorSpec& spec, std::size_t product_cap = default_product_cap);

/// Closed-form counting/mass dimension of the family. For IP specs the limsup is taken
/// as the maximum over the second half of the provided prefix. Products add factor
/// dimensions (all supported families are compatible with each other).
double expected_dimension(const GeneratorSpec& spec);

GeneratorSpec generator_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GeneratorSpec& spec);

} // namespace latdim
