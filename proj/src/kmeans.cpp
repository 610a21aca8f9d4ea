#include "abimca/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "abimca/core/error.hpp"
#include "abimca/core/rng.hpp"
#include "abimca/simd/kernels.hpp"

namespace abimca {
namespace {

std::size_t nearest(std::span<const double> x, const Matrix& centroids) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
        const double d = simd::squared_distance(x, centroids.row(c));
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

LabelArray to_step_labels(std::size_t n, std::size_t seq_len, const std::vector<std::size_t>& assignment) {
    LabelArray out(n);
    for (std::size_t w = 0; w < assignment.size(); ++w) out[w + seq_len - 1] = static_cast<Label>(assignment[w] + 1);
    for (std::size_t t = 0; t + 1 < seq_len; ++t) out[t] = out[seq_len - 1];
    return out;
}

}  // namespace

void KMeansConfig::validate() const {
    if (n_clusters < 1) throw ConfigError("kmeans config: n_clusters must be at least 1");
    if (max_iter < 1) throw ConfigError("kmeans config: max_iter must be at least 1");
    if (batch_size < 1) throw ConfigError("kmeans config: batch_size must be at least 1");
    if (seq_len < 1) throw ConfigError("kmeans config: seq_len must be at least 1");
}

Matrix window_features(const TimeSeries& series, std::size_t seq_len) {
    const std::size_t n = series.length(), d = series.dims();
    if (seq_len < 1 || seq_len > n) throw std::invalid_argument("kmeans: seq_len must be in [1, n]");
    const std::size_t m = n - seq_len + 1;
    Matrix out(m, d * seq_len);
    for (std::size_t w = 0; w < m; ++w) {
        auto row = out.row(w);
        for (std::size_t k = 0; k < seq_len; ++k) {
            for (std::size_t f = 0; f < d; ++f) row[k * d + f] = series(f, w + k);
        }
    }
    return out;
}

std::vector<std::size_t> assign_nearest(const Matrix& samples, const Matrix& centroids) {
    std::vector<std::size_t> out(samples.rows());
    for (std::size_t i = 0; i < samples.rows(); ++i) out[i] = nearest(samples.row(i), centroids);
    return out;
}

KMeansResult fit_predict(const TimeSeries& series, const KMeansConfig& config) {
    config.validate();
    if (series.length() < config.seq_len) throw std::invalid_argument("kmeans: series shorter than seq_len");
    const Matrix x = window_features(series, config.seq_len);
    const std::size_t m = x.rows(), k = config.n_clusters, p = x.cols();
    if (k > m) throw std::invalid_argument("kmeans: more clusters than windows");

    Rng rng(config.seed);
    std::vector<std::size_t> pool(m);
    std::iota(pool.begin(), pool.end(), 0);
    KMeansModel model{Matrix(k, p), std::vector<std::size_t>(k, 0), config.seq_len};
    for (std::size_t c = 0; c < k; ++c) {
        const std::size_t j = c + rng.below(m - c);
        std::swap(pool[c], pool[j]);
        std::copy(x.row(pool[c]).begin(), x.row(pool[c]).end(), model.centroids.row(c).begin());
    }

    std::vector<std::size_t> batch(config.batch_size), cached(config.batch_size);
    for (std::size_t it = 0; it < config.max_iter; ++it) {
        for (std::size_t b = 0; b < batch.size(); ++b) batch[b] = rng.below(m);
        for (std::size_t b = 0; b < batch.size(); ++b) cached[b] = nearest(x.row(batch[b]), model.centroids);
        for (std::size_t b = 0; b < batch.size(); ++b) {
            const std::size_t c = cached[b];
            const double eta = 1.0 / static_cast<double>(++model.counts[c]);
            auto centroid = model.centroids.row(c);
            const auto sample = x.row(batch[b]);
            for (std::size_t f = 0; f < p; ++f) centroid[f] = (1.0 - eta) * centroid[f] + eta * sample[f];
        }
    }

    std::vector<std::size_t> assignment = assign_nearest(x, model.centroids);
    for (std::size_t round = 0; round < k; ++round) {
        std::vector<std::size_t> size(k, 0);
        for (std::size_t a : assignment) ++size[a];
        const auto empty = std::find(size.begin(), size.end(), 0);
        if (empty == size.end()) break;
        const std::size_t largest = static_cast<std::size_t>(std::max_element(size.begin(), size.end()) - size.begin());
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (assignment[i] != largest) continue;
            const double d = simd::squared_distance(x.row(i), model.centroids.row(largest));
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        const std::size_t e = static_cast<std::size_t>(empty - size.begin());
        std::copy(x.row(far).begin(), x.row(far).end(), model.centroids.row(e).begin());
        assignment = assign_nearest(x, model.centroids);
    }

    KMeansResult out;
    out.labels = to_step_labels(series.length(), config.seq_len, assignment);
    out.model = std::move(model);
    out.assignment = std::move(assignment);
    return out;
}

LabelArray predict(const KMeansModel& model, const TimeSeries& series) {
    const Matrix x = window_features(series, model.seq_len);
    if (x.cols() != model.centroids.cols()) throw std::invalid_argument("kmeans predict: feature width mismatch");
    return to_step_labels(series.length(), model.seq_len, assign_nearest(x, model.centroids));
}

double inertia(const TimeSeries& series, const LabelArray& labels, const KMeansModel& model) {
    if (labels.size() != series.length()) throw std::invalid_argument("inertia: label count does not match series");
    const Matrix x = window_features(series, model.seq_len);
    if (x.cols() != model.centroids.cols()) throw std::invalid_argument("inertia: feature width mismatch");
    double total = 0.0;
    for (std::size_t w = 0; w < x.rows(); ++w) {
        const Label l = labels[w + model.seq_len - 1];
        if (l < 1 || static_cast<std::size_t>(l) > model.centroids.rows()) {
            throw std::invalid_argument("inertia: label outside centroid range");
        }
        total += simd::squared_distance(x.row(w), model.centroids.row(static_cast<std::size_t>(l - 1)));
    }
    return total;
}

}  // namespace abimca
