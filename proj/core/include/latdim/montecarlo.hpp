#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "latdim/dimension.hpp"
#include "latdim/generators.hpp"
#include "latdim/projection.hpp"
#include "latdim/rng.hpp"

namespace latdim {

/// One experiment, read from a single JSON document. The source set is the Cartesian
/// product of `sets` (a single entry is used as is).
struct ExperimentConfig {
    std::vector<GeneratorSpec> sets;
    std::size_t k = 1;
    std::size_t samples = 200;
    EntryBox box{-2.0, 2.0};
    std::optional<ScaleGrid> scales;       ///< default: dyadic grid of each projected set
    std::optional<std::size_t> window;     ///< top scales used in fits; default largest half
    std::uint64_t seed = default_seed;
    double tolerance = 0.07;
    std::optional<double> target;          ///< default min(k, closed-form dimension of the source)
    bool counting = true;                  ///< also estimate the counting dimension per sample

    // Small-projection (delta) experiments.
    std::optional<double> alpha;
    std::vector<double> delta_grid;
    double ratio_bound = 5.0;

    unsigned threads = 1;                  ///< not part of the serialized config
};

ExperimentConfig config_from_json(const nlohmann::json& j);
/// Canonical serialization; omits `threads` so reports do not depend on it.
nlohmann::json to_json(const ExperimentConfig& cfg);

struct Quantiles {
    double q05 = 0, q25 = 0, median = 0, q75 = 0, q95 = 0;
};
/// Linear-interpolation quantiles of a non-empty sample.
Quantiles quantiles(std::vector<double> values);

struct SampleRecord {
    std::vector<double> matrix;
    std::size_t image_size = 0;
    std::size_t boundary_ties = 0;
    std::vector<Coord> sides;
    std::vector<std::size_t> mass_counts;
    std::vector<std::size_t> counting_counts;
    double mass_dim = 0.0;
    std::optional<double> counting_dim;
};

struct DimensionSummary {
    Quantiles quantiles;
    double fraction_within = 0.0;   ///< |estimate - target| <= tolerance
    double fraction_at_least = 0.0; ///< estimate >= target - tolerance
};

struct McReport {
    nlohmann::json config;
    double target = 0.0;
    double tolerance = 0.0;
    double ambient_mass_dim = 0.0;
    double ambient_counting_dim = 0.0;
    /// Finite-scale counting and mass estimates of the source disagree by more than the
    /// tolerance, so equality of projected mass dimension is not asserted.
    bool inconclusive = false;
    std::size_t consistency_violations = 0; ///< samples with mass estimate > min(k, ambient) + 0.15
    DimensionSummary mass;
    std::optional<DimensionSummary> counting;
    std::vector<SampleRecord> per_sample;
};

McReport run_projection_experiment(const ExperimentConfig& cfg, std::optional<double> target = std::nullopt);

struct DeltaRow {
    double delta = 0.0;
    double threshold = 0.0;   ///< delta * |E| / ||E||^max(0, alpha - k)
    std::size_t below = 0;    ///< samples with image size below the threshold
    double fraction = 0.0;
    double ratio = 0.0;       ///< fraction / delta (0 when delta = 0)
};

struct DeltaReport {
    nlohmann::json config;
    double alpha = 0.0;
    std::size_t k = 1;
    std::size_t set_size = 0;
    Coord cubic_diameter = 0;
    double normalizer = 0.0;  ///< |E| / ||E||^max(0, alpha - k)
    std::vector<DeltaRow> rows;
    double fit_slope = 0.0;   ///< least-squares fraction ~ a + b delta
    double fit_intercept = 0.0;
    double max_ratio = 0.0;
    bool monotone = true;
    /// Some fraction exceeds ratio_bound * delta: growth beyond the linear envelope.
    bool super_linear = false;
    std::vector<std::size_t> image_sizes;
};

DeltaReport run_delta_experiment(const LatticeSet& set, double alpha, const std::vector<double>& delta_grid,
                                 const ExperimentConfig& cfg);

/// Materializes the product of the configured sets.
LatticeSet materialize_source(const ExperimentConfig& cfg);

nlohmann::json to_json(const McReport& r);
nlohmann::json to_json(const DeltaReport& r);

void write_samples_csv(std::ostream& out, const McReport& r);
void write_delta_csv(std::ostream& out, const DeltaReport& r);
/// A small matplotlib script that plots the CSV written next to the report.
std::string plot_script(const std::string& csv_name, bool delta);

} // namespace latdim
