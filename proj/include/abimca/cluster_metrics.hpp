#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "abimca/core/matrix.hpp"
#include "abimca/curve_geometry.hpp"
#include "abimca/timeseries.hpp"

namespace abimca {

/// Per-subsequence summary used by the two derived silhouette spaces.
struct SubseqFeatures {
    Label cluster_id = 0;
    std::size_t subseq_index = 0;  // j-th subsequence of its cluster, 0-based
    std::size_t start = 0;
    double mean_kappa = 0.0;
    double mean_tau = 0.0;
    double mean_accel = 0.0;
    double sigma = 0.0;  // mean of the kappa, tau, accel sample stds (0 for length 1)
    std::size_t count = 0;
    std::vector<double> medians;  // per feature, of the original values
};

struct MetricOptions {
    /// When false, steps labeled 0 are dropped from every component.
    bool include_label_zero = true;
};

struct MetricReport {
    double mt3scm = 0.0;
    double wcc = 0.0;
    std::map<Label, double> cc_per_cluster;
    std::map<Label, std::size_t> cluster_sizes;
    double sl = 0.0;
    double sp = 0.0;
    /// Standard metrics on the raw points. CH and DB are empty when undefined
    /// (fewer than 2 clusters, or no more points than clusters for CH).
    double silhouette = 0.0;
    std::optional<double> calinski_harabasz;
    std::optional<double> davies_bouldin;
    std::size_t n_clusters = 0;
    std::size_t n_subsequences = 0;
    /// Fewer than 2 distinct labels: sl = sp = silhouette = 0.
    bool degenerate = false;
};

/// 1 - mean(std kappa, std tau, std accel) over all steps of each cluster,
/// clamped below at -1. Single-step clusters get 0.
std::map<Label, double> cluster_curvature_consistency(const CurveParams& params, std::span<const Label> labels);

/// sum cc_i N_i / sum N_i. Throws std::invalid_argument on an empty map or
/// mismatched keys.
double weighted_cc(const std::map<Label, double>& cc, const std::map<Label, std::size_t>& counts);

/// Mean silhouette of m samples (rows of `points`). Samples in singleton
/// clusters contribute 0; fewer than 2 distinct labels gives 0.
double silhouette(const Matrix& points, std::span<const Label> labels);

/// Throws std::invalid_argument with fewer than 2 clusters or m <= k.
/// Zero within-cluster dispersion returns 1.
double calinski_harabasz(const Matrix& points, std::span<const Label> labels);

/// Throws std::invalid_argument with fewer than 2 clusters. Coincident
/// centroids contribute a ratio of 0.
double davies_bouldin(const Matrix& points, std::span<const Label> labels);

std::vector<SubseqFeatures> subsequence_features(const TimeSeries& series, const CurveParams& params,
                                                 std::span<const Label> labels);

/// Rows [mean kappa, mean tau, mean accel, sigma, N] and [medians..., sigma, N].
Matrix sp_matrix(std::span<const SubseqFeatures> features);
Matrix sl_matrix(std::span<const SubseqFeatures> features);

MetricReport mt3scm(const TimeSeries& series, std::span<const Label> labels, const MetricOptions& options = {});

/// Same as above with curve parameters already computed for `series`.
MetricReport mt3scm(const TimeSeries& series, const CurveParams& params, std::span<const Label> labels,
                    const MetricOptions& options = {});

}  // namespace abimca
