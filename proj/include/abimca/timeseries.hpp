#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "abimca/core/matrix.hpp"

namespace abimca {

/// Multivariate series sampled at a constant rate: d features x n time steps.
/// Time is implicit (column index); `sample_period` is informational only.
class TimeSeries {
public:
    /// Throws std::invalid_argument on d < 1, n < 2, non-finite entries,
    /// a name count that does not match d, or a non-positive sample period.
    explicit TimeSeries(Matrix values, std::vector<std::string> feature_names = {},
                        double sample_period = 1.0);

    std::size_t dims() const noexcept { return values_.rows(); }
    std::size_t length() const noexcept { return values_.cols(); }
    const Matrix& values() const noexcept { return values_; }
    double operator()(std::size_t feature, std::size_t t) const noexcept { return values_(feature, t); }
    std::span<const double> feature(std::size_t f) const noexcept { return values_.row(f); }

    /// Names are generated as x0, x1, ... when none were given.
    const std::vector<std::string>& feature_names() const noexcept { return names_; }
    double sample_period() const noexcept { return sample_period_; }

private:
    Matrix values_;
    std::vector<std::string> names_;
    double sample_period_;
};

/// d x zeta copy of consecutive columns of a series.
struct SlidingWindow {
    Matrix values;
    std::size_t start = 0;

    std::size_t dims() const noexcept { return values.rows(); }
    std::size_t length() const noexcept { return values.cols(); }
    /// Time index of the last column.
    std::size_t end_index() const noexcept { return start + values.cols() - 1; }
};

/// Per-step cluster ids. 0 is reserved for "unknown / in transition".
using Label = std::int64_t;
using LabelArray = std::vector<Label>;

/// Maximal run of identical consecutive labels.
struct Subsequence {
    Label cluster_id = 0;
    std::size_t start = 0;
    std::size_t length = 0;

    std::size_t end() const noexcept { return start + length; }
    friend bool operator==(const Subsequence&, const Subsequence&) = default;
};

struct StandardizationStats {
    std::vector<double> mean;
    std::vector<double> stddev;
};

/// Run-length encoding of a label array, in time order.
std::vector<Subsequence> segment_labels(std::span<const Label> labels);

/// Inverse of segment_labels.
LabelArray expand_segments(std::span<const Subsequence> segments);

/// Windows of `length` columns at starts 0, stride, 2*stride, ... while they fit.
/// Throws std::invalid_argument if length < 2, length > n or stride < 1.
std::vector<SlidingWindow> windows(const TimeSeries& series, std::size_t length, std::size_t stride = 1);

/// Start indices produced by windows() without copying any data.
std::vector<std::size_t> window_starts(std::size_t n, std::size_t length, std::size_t stride = 1);

SlidingWindow window_at(const TimeSeries& series, std::size_t start, std::size_t length);

/// Per-feature mean and sample standard deviation (n-1); std floored at 1e-12.
StandardizationStats fit_stats(const TimeSeries& series);

/// (x - mean) / std per feature. Throws std::invalid_argument on dimension
/// mismatch or a non-positive std entry.
TimeSeries standardize(const TimeSeries& series, const StandardizationStats& stats);

/// x * std + mean per feature.
TimeSeries unstandardize(const TimeSeries& series, const StandardizationStats& stats);

inline constexpr double kStdFloor = 1e-12;

}  // namespace abimca
