#include "abimca/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace abimca {

TimeSeries::TimeSeries(Matrix values, std::vector<std::string> feature_names, double sample_period)
    : values_(std::move(values)), names_(std::move(feature_names)), sample_period_(sample_period) {
    if (values_.rows() < 1) throw std::invalid_argument("TimeSeries: need at least one feature");
    if (values_.cols() < 2) throw std::invalid_argument("TimeSeries: need at least two time steps");
    if (!(sample_period_ > 0.0) || !std::isfinite(sample_period_)) {
        throw std::invalid_argument("TimeSeries: sample period must be positive");
    }
    for (double v : values_.flat()) {
        if (!std::isfinite(v)) throw std::invalid_argument("TimeSeries: non-finite value");
    }
    if (names_.empty()) {
        for (std::size_t f = 0; f < values_.rows(); ++f) names_.push_back("x" + std::to_string(f));
    } else if (names_.size() != values_.rows()) {
        throw std::invalid_argument("TimeSeries: feature name count does not match dimension");
    }
}

std::vector<Subsequence> segment_labels(std::span<const Label> labels) {
    std::vector<Subsequence> out;
    std::size_t start = 0;
    for (std::size_t t = 1; t <= labels.size(); ++t) {
        if (t == labels.size() || labels[t] != labels[start]) {
            out.push_back({labels[start], start, t - start});
            start = t;
        }
    }
    return out;
}

LabelArray expand_segments(std::span<const Subsequence> segments) {
    LabelArray out;
    for (const auto& s : segments) out.insert(out.end(), s.length, s.cluster_id);
    return out;
}

std::vector<std::size_t> window_starts(std::size_t n, std::size_t length, std::size_t stride) {
    if (length < 2) throw std::invalid_argument("windows: length must be at least 2");
    if (length > n) throw std::invalid_argument("windows: length exceeds series length");
    if (stride < 1) throw std::invalid_argument("windows: stride must be at least 1");
    std::vector<std::size_t> starts;
    starts.reserve((n - length) / stride + 1);
    for (std::size_t s = 0; s + length <= n; s += stride) starts.push_back(s);
    return starts;
}

SlidingWindow window_at(const TimeSeries& series, std::size_t start, std::size_t length) {
    return {series.values().col_slice(start, length), start};
}

std::vector<SlidingWindow> windows(const TimeSeries& series, std::size_t length, std::size_t stride) {
    std::vector<SlidingWindow> out;
    for (std::size_t s : window_starts(series.length(), length, stride)) {
        out.push_back(window_at(series, s, length));
    }
    return out;
}

StandardizationStats fit_stats(const TimeSeries& series) {
    const std::size_t n = series.length();
    StandardizationStats stats;
    for (std::size_t f = 0; f < series.dims(); ++f) {
        const auto x = series.feature(f);
        double mean = 0.0;
        for (double v : x) mean += v;
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (double v : x) ss += (v - mean) * (v - mean);
        stats.mean.push_back(mean);
        stats.stddev.push_back(std::max(std::sqrt(ss / static_cast<double>(n - 1)), kStdFloor));
    }
    return stats;
}

namespace {

void check_stats(const TimeSeries& series, const StandardizationStats& stats) {
    if (stats.mean.size() != series.dims() || stats.stddev.size() != series.dims()) {
        throw std::invalid_argument("standardize: stats dimension does not match series");
    }
    for (double s : stats.stddev) {
        if (!(s > 0.0)) throw std::invalid_argument("standardize: std entries must be positive");
    }
}

}  // namespace

TimeSeries standardize(const TimeSeries& series, const StandardizationStats& stats) {
    check_stats(series, stats);
    Matrix out = series.values();
    for (std::size_t f = 0; f < out.rows(); ++f) {
        for (double& v : out.row(f)) v = (v - stats.mean[f]) / stats.stddev[f];
    }
    return TimeSeries(std::move(out), series.feature_names(), series.sample_period());
}

TimeSeries unstandardize(const TimeSeries& series, const StandardizationStats& stats) {
    check_stats(series, stats);
    Matrix out = series.values();
    for (std::size_t f = 0; f < out.rows(); ++f) {
        for (double& v : out.row(f)) v = v * stats.stddev[f] + stats.mean[f];
    }
    return TimeSeries(std::move(out), series.feature_names(), series.sample_period());
}

}  // namespace abimca
