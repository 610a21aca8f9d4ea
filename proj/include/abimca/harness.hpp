#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "abimca/cluster_metrics.hpp"
#include "abimca/core/rng.hpp"
#include "abimca/datasets.hpp"
#include "abimca/engine.hpp"
#include "abimca/params.hpp"

namespace abimca {

inline constexpr std::string_view kAbimca = "abimca";
inline constexpr std::string_view kMiniBatchKMeans = "mini-batch-kmeans";

enum class ParamKind { Integer, Real };

struct ParamBound {
    std::string name;
    double lower = 0.0;
    double upper = 0.0;
    ParamKind kind = ParamKind::Real;
};

struct ParamSpace {
    std::string algorithm;
    std::vector<ParamBound> params;

    /// Throws ConfigError if lower > upper or a bound is not finite.
    void validate() const;
};

/// Search bounds for "abimca" and "mini-batch-kmeans". Throws ConfigError for
/// other ids.
ParamSpace default_space(std::string_view algorithm);

/// Parameter name to sampled value, in space order.
using ParamAssignment = std::vector<std::pair<std::string, double>>;

/// Uniform draw within each bound; integer parameters are uniform over the
/// integers in [lower, upper].
ParamAssignment sample_assignment(const ParamSpace& space, Rng& rng);

enum class Metric { Mt3scm, Silhouette, CalinskiHarabasz, DaviesBouldin };
inline constexpr Metric kAllMetrics[] = {Metric::Mt3scm, Metric::Silhouette, Metric::CalinskiHarabasz,
                                         Metric::DaviesBouldin};

std::string_view metric_name(Metric m) noexcept;
bool higher_is_better(Metric m) noexcept;
/// Empty when the metric is undefined for this report.
std::optional<double> metric_value(const MetricReport& report, Metric m);

/// Strict comparison under the metric's direction.
bool beats(Metric m, double a, double b) noexcept;

/// Bundled datasets: "stepped" (4 regimes, dwell 100, 2 cycles), "perfect",
/// "lorenz" and "thomas" (2000 steps each). Throws ConfigError for other ids.
LabeledSeries load_dataset(std::string_view id);
std::vector<std::string> dataset_ids();

struct RunRecord {
    std::size_t index = 0;
    std::string algorithm;
    std::string dataset;
    ParamAssignment params;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
    MetricReport report;
    double wall_seconds = 0.0;
    LabelArray labels;
};

/// Runs one algorithm on a series with the given parameter overrides on top
/// of the defaults. Algorithms see standardized data; metrics use the raw
/// series. Exceptions are captured in the record.
RunRecord run_single(std::string_view algorithm, std::string_view dataset, const TimeSeries& series,
                     const ParamAssignment& params, std::uint64_t seed);

/// Re-executes a record from its stored algorithm, dataset, params and seed.
RunRecord rerun(const RunRecord& record);

/// `samples` independent assignments, run on a worker pool of `threads`
/// (0 = hardware concurrency) and gathered by index. Throws ConfigError for
/// unknown ids and std::invalid_argument when samples < 1.
std::vector<RunRecord> random_search(std::string_view algorithm, std::string_view dataset, const ParamSpace& space,
                                     std::size_t samples, std::uint64_t seed, std::size_t threads = 0);

/// Best non-failed record per metric; metrics with no defined value are
/// omitted. Throws std::invalid_argument if every record failed.
std::map<Metric, const RunRecord*> best_by_metric(const std::vector<RunRecord>& records);

/// records[algorithm][dataset] -> runs
using RecordsByAlgorithm = std::map<std::string, std::map<std::string, std::vector<RunRecord>>>;

struct OutperformanceTable {
    std::string baseline;
    std::vector<std::string> datasets;
    /// counts[algorithm][metric] = datasets where the algorithm's best value
    /// strictly beats the baseline's best value.
    std::map<std::string, std::map<Metric, std::size_t>> counts;
    std::map<std::string, std::size_t> totals;
};

/// Throws ConfigError if the baseline is missing.
OutperformanceTable outperformance(const RecordsByAlgorithm& records, const std::string& baseline);

struct PairwiseCounts {
    std::size_t a_wins = 0;
    std::size_t b_wins = 0;
    std::size_t ties = 0;  // equal values or a metric undefined on either side
};

/// Over every dataset present for both algorithms and every metric.
PairwiseCounts pairwise(const RecordsByAlgorithm& records, const std::string& a, const std::string& b);

/// Columns t, s_b, s_1..s_c, eta, rho. Cells for snapshots that did not yet
/// exist at a step are left empty.
void write_score_trace(const std::filesystem::path& path, const std::vector<StepResult>& steps,
                       std::size_t registry_size, const AbimcaConfig& config);

/// Columns t, features..., label.
void write_step_data(const std::filesystem::path& path, const TimeSeries& series, const LabelArray& labels);

/// Columns t, features..., kappa, tau, speed, accel[, label].
void write_trajectory(const std::filesystem::path& path, const TimeSeries& series, const CurveParams& params,
                      const LabelArray* labels = nullptr);

/// key,value rows for every MetricReport field.
void write_metric_report(const std::filesystem::path& path, const MetricReport& report);

/// runs/<id>/params.cfg, labels.csv, metrics.csv (and trace.csv when steps are given).
void write_run_dir(const std::filesystem::path& dir, const RunRecord& record,
                   const std::vector<StepResult>* steps = nullptr, const AbimcaConfig* config = nullptr,
                   std::size_t registry_size = 0);

/// One row per record: index, seed, failed, params..., metrics.
void write_records_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records);

}  // namespace abimca
