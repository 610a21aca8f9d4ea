#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "abimca/autoencoder.hpp"
#include "abimca/timeseries.hpp"

namespace abimca {

struct AbimcaConfig {
    double learning_rate = 0.01;
    std::size_t train_cycles = 10;     // omega
    double detection_threshold = 0.05;  // eta
    double theta_factor = 2.0;          // rho = theta_factor * eta
    std::size_t window_length = 10;     // zeta
    std::size_t stride = 1;
    double score_weight = 1.0;  // c_fw
    double latent_center = 0.5;
    double penalty_weight = 1e-10;
    bool allow_unknown_in_predict = true;
    std::uint64_t seed = 0;

    double recognition_threshold() const noexcept { return theta_factor * detection_threshold; }
    TrainConfig train_config() const noexcept {
        return {learning_rate, penalty_weight, latent_center, seed};
    }
    /// Throws ConfigError on an invalid combination.
    void validate() const;
};

/// s = c_fw * mean_i |c_lc - h_i| + l / c_fw
double score(double loss_total, std::span<const double> latent, const AbimcaConfig& config);

/// Frozen base-model snapshots with ids 1..size(), plus the standardization the
/// models were trained under.
class SubseqRegistry {
public:
    std::size_t size() const noexcept { return models_.size(); }
    bool empty() const noexcept { return models_.empty(); }
    /// 1-based id. Throws std::out_of_range.
    const AeModel& model(Label id) const { return models_.at(static_cast<std::size_t>(id - 1)); }
    /// Time index at which snapshot `id` was created.
    std::size_t created_at(Label id) const { return created_.at(static_cast<std::size_t>(id - 1)); }

    /// Appends a snapshot and returns its id.
    Label add(AeModel model, std::size_t created_at);

    StandardizationStats stats;

private:
    std::vector<AeModel> models_;
    std::vector<std::size_t> created_;
};

struct StepResult {
    std::size_t t = 0;  // time index of the window's last column
    Label label = 0;
    double base_score = 0.0;
    std::vector<double> subseq_scores;  // one per registry entry before this step
    LossBreakdown loss;                 // base model after training
};

/// One online stream: base model, registry and the per-window update rule.
/// Windows passed to process_window must already be standardized.
class Engine {
public:
    Engine(std::size_t dims, AbimcaConfig config);

    /// Trains the base model omega times, rescores it, scores every snapshot
    /// and assigns a label. Throws NumericError carrying the time index if
    /// training diverges.
    StepResult process_window(const SlidingWindow& window);

    const SubseqRegistry& registry() const noexcept { return registry_; }
    SubseqRegistry& registry() noexcept { return registry_; }
    const AeModel& base_model() const noexcept { return base_; }
    const AbimcaConfig& config() const noexcept { return config_; }

private:
    AbimcaConfig config_;
    AeModel base_;
    SubseqRegistry registry_;
};

/// Score of a frozen model on a standardized window.
double score_window(const AeModel& model, const Matrix& window, const AbimcaConfig& config);

/// Writes each window label to the window's last step; other steps carry the
/// most recent label (0 before the first window).
LabelArray propagate_labels(std::size_t n, std::span<const std::size_t> window_ends, std::span<const Label> labels);

struct OnlineResult {
    LabelArray labels;
    std::vector<StepResult> steps;
    SubseqRegistry registry;
};

/// Standardizes with `stats` if given, otherwise with fit_stats(series), then
/// processes every window. Throws std::invalid_argument if n < zeta.
OnlineResult run_online(const TimeSeries& series, const AbimcaConfig& config,
                        const std::optional<StandardizationStats>& stats = std::nullopt);

struct OfflineResult {
    LabelArray labels;
    std::vector<std::size_t> window_ends;
    std::vector<std::vector<double>> scores;  // per window, one per snapshot
};

/// Scores each window against all snapshots without training, using the
/// registry's stats. Throws std::invalid_argument on an empty registry.
OfflineResult predict_offline_detailed(const TimeSeries& series, const SubseqRegistry& registry,
                                       const AbimcaConfig& config);

LabelArray predict_offline(const TimeSeries& series, const SubseqRegistry& registry, const AbimcaConfig& config);

}  // namespace abimca
