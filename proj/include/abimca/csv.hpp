#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "abimca/timeseries.hpp"

namespace abimca {

struct LoadedSeries {
    TimeSeries series;
    std::optional<LabelArray> labels;
};

/// Reads a series CSV: a header of feature names, then one row per time step.
/// With `has_labels` the last column is parsed as non-negative integer labels.
/// Throws ParseError (with 1-based row/column) on ragged rows, non-numeric or
/// non-finite cells, and empty files.
LoadedSeries load_csv(const std::filesystem::path& path, bool has_labels = false);

/// Single-column label file; a non-numeric first line is treated as a header.
LabelArray load_labels_csv(const std::filesystem::path& path);

/// Values are written with 17 significant digits so they read back exactly.
void write_series_csv(const std::filesystem::path& path, const TimeSeries& series,
                      const LabelArray* labels = nullptr);

void write_labels_csv(const std::filesystem::path& path, const LabelArray& labels);

/// Generic numeric table with a header row.
void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace abimca
