#pragma once

#include <cstdint>
#include <vector>

#include "abimca/core/matrix.hpp"
#include "abimca/timeseries.hpp"

namespace abimca {

struct KMeansConfig {
    std::size_t n_clusters = 4;
    std::size_t max_iter = 100;  // number of mini-batches
    std::size_t batch_size = 256;
    std::size_t seq_len = 1;
    std::uint64_t seed = 0;

    /// Throws ConfigError when any field is zero.
    void validate() const;
};

struct KMeansModel {
    Matrix centroids;  // k x (d * seq_len)
    std::vector<std::size_t> counts;
    std::size_t seq_len = 1;
};

struct KMeansResult {
    LabelArray labels;  // per step, 1-based
    KMeansModel model;
    std::vector<std::size_t> assignment;  // per window, 0-based centroid
};

/// One row per stride-1 window of `seq_len` steps, flattened time-major:
/// [x_t, x_t+1, ...] with all d features of each step adjacent.
Matrix window_features(const TimeSeries& series, std::size_t seq_len);

/// Index of the nearest centroid for every row (ties go to the lowest index).
std::vector<std::size_t> assign_nearest(const Matrix& samples, const Matrix& centroids);

/// Mini-batch k-means with per-centroid learning rate 1/count. Centroids start
/// at k distinct windows. Clusters left empty after training are re-seeded with
/// the farthest member of the largest cluster. Each window's label goes to its
/// last step and the first seq_len-1 steps take the first window's label.
/// Throws std::invalid_argument if n < seq_len or k exceeds the window count.
KMeansResult fit_predict(const TimeSeries& series, const KMeansConfig& config);

/// Labels a series with a fitted model using the same propagation rule.
LabelArray predict(const KMeansModel& model, const TimeSeries& series);

/// Sum of squared distances of each window to the centroid of the label at
/// the window's last step.
double inertia(const TimeSeries& series, const LabelArray& labels, const KMeansModel& model);

}  // namespace abimca
