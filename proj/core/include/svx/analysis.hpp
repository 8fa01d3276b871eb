#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "svx/confusion.hpp"
#include "svx/study.hpp"

namespace svx {

enum class Dimension { actor, action };

struct MatchResult {
    std::uint64_t record_id = 0;
    VideoTruth truth;
    PerceptionRecord record;
    bool actor_match = false;   ///< unknown never matches
    bool action_match = false;
};

/// Scores every record against the dataset's ground truth. Records naming an
/// unknown video raise ValidationError.
std::vector<MatchResult> match_records(std::span<const StoredRecord> records,
                                       const StudyDataset& dataset);

/// Rows: ground-truth classes. Columns: "unknown" followed by the classes.
ConfusionMatrix confusion(std::span<const MatchResult> matches, Dimension dimension);

enum class Stratum { level, actor, background, action };
Stratum parse_stratum(std::string_view name);
std::string_view to_string(Stratum stratum);

struct StratumRow {
    std::string name;
    std::size_t n = 0;
    std::size_t actor_matches = 0;
    std::size_t action_matches = 0;
    std::optional<double> actor_rate;   ///< undefined when n == 0
    std::optional<double> action_rate;
};

/// Lists every stratum value of the dimension, including empty ones.
std::vector<StratumRow> stratified_accuracy(std::span<const MatchResult> matches, Stratum by);

struct AggregateRates {
    std::size_t n = 0;
    double actor_rate = 0.0;
    double action_rate = 0.0;
};
AggregateRates aggregate_rates(std::span<const MatchResult> matches);

enum class Correctness { correct, incorrect, both };

struct DensityFilter {
    Correctness correctness = Correctness::both;
    Dimension judged_on = Dimension::action;
    std::optional<Stratum> stratum;
    std::string stratum_value;
};

struct DensityEstimate {
    std::vector<double> samples;  ///< seconds
    std::vector<double> bin_edges;
    std::vector<std::size_t> counts;
    std::vector<double> grid;
    std::vector<double> values;
    double bandwidth = 0.0;
};

inline constexpr double kDensityBinSeconds = 0.5;
inline constexpr int kDensityGridPoints = 200;

/// 0.9 * min(sd, IQR / 1.34) * n^(-1/5); falls back to whichever spread is
/// nonzero and to half a histogram bin when the sample is constant.
double silverman_bandwidth(std::span<const double> samples);

/// Histogram (0.5 s bins over [0, max_duration]) and Gaussian KDE on a
/// 200-point grid that covers the histogram range and 4 bandwidths beyond
/// the extreme samples.
DensityEstimate density_estimate(std::vector<double> samples_seconds, double max_duration_seconds);

std::vector<MatchResult> filter_matches(std::span<const MatchResult> matches,
                                        const DensityFilter& filter);

/// Throws ValidationError on an empty selection.
DensityEstimate response_time_density(std::span<const MatchResult> matches,
                                      const DensityFilter& filter, double max_duration_seconds);

/// Trapezoid integral of the KDE over its grid.
double integrate_density(const DensityEstimate& estimate);

// ---- report output -------------------------------------------------------

std::string confusion_text(const ConfusionMatrix& matrix);
std::string confusion_json(const ConfusionMatrix& matrix);
std::string strata_text(std::span<const StratumRow> rows);
std::string strata_json(std::span<const StratumRow> rows);
std::string density_csv(const DensityEstimate& estimate);

/// Histogram bars (blue) and KDE curve (red) as a PPM image.
void render_density_plot(const DensityEstimate& estimate, const std::filesystem::path& path,
                         int width = 480, int height = 240);

/// Writes every table, density file and plot of a full analysis run.
void write_analysis(std::span<const StoredRecord> records, const StudyDataset& dataset,
                    const std::filesystem::path& out_dir);

}  // namespace svx
