#include "abimca/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "abimca/core/error.hpp"

namespace abimca {
namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_real(const std::string& cell, std::size_t row, std::size_t col) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw ParseError("invalid numeric cell '" + cell + "' at row " + std::to_string(row) +
                             ", column " + std::to_string(col),
                         row, col);
    }
    return v;
}

Label parse_label(const std::string& cell, std::size_t row, std::size_t col) {
    Label v = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || v < 0) {
        throw ParseError("invalid label cell '" + cell + "' at row " + std::to_string(row) +
                             ", column " + std::to_string(col),
                         row, col);
    }
    return v;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

LoadedSeries load_csv(const std::filesystem::path& path, bool has_labels) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || trim(line).empty()) throw ParseError("empty file: " + path.string(), 1, 0);

    std::vector<std::string> header = split(line);
    const std::size_t width = header.size();
    if (has_labels && width < 2) throw ParseError("label column requires at least one feature column", 1, 0);
    const std::size_t dims = has_labels ? width - 1 : width;

    std::vector<std::vector<double>> columns(dims);
    LabelArray labels;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto cells = split(line);
        if (cells.size() != width) {
            throw ParseError("row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                                 " cells, expected " + std::to_string(width),
                             row, 0);
        }
        for (std::size_t c = 0; c < dims; ++c) columns[c].push_back(parse_real(cells[c], row, c + 1));
        if (has_labels) labels.push_back(parse_label(cells[dims], row, width));
    }
    const std::size_t n = columns.front().size();
    if (n == 0) throw ParseError("no data rows in " + path.string(), 2, 0);

    Matrix values(dims, n);
    for (std::size_t f = 0; f < dims; ++f) std::copy(columns[f].begin(), columns[f].end(), values.row(f).begin());
    header.resize(dims);
    LoadedSeries out{TimeSeries(std::move(values), std::move(header)), std::nullopt};
    if (has_labels) out.labels = std::move(labels);
    return out;
}

LabelArray load_labels_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    LabelArray labels;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        const std::string cell = trim(line);
        if (cell.empty()) continue;
        if (row == 1 && (cell.front() < '0' || cell.front() > '9') && cell.front() != '-') continue;
        if (cell.find(',') != std::string::npos) {
            throw ParseError("label file must have a single column (row " + std::to_string(row) + ")", row, 2);
        }
        labels.push_back(parse_label(cell, row, 1));
    }
    if (labels.empty()) throw ParseError("empty label file: " + path.string());
    return labels;
}

void write_series_csv(const std::filesystem::path& path, const TimeSeries& series, const LabelArray* labels) {
    auto out = open_out(path);
    const auto& names = series.feature_names();
    for (std::size_t f = 0; f < names.size(); ++f) out << (f ? "," : "") << names[f];
    if (labels) out << ",label";
    out << '\n';
    for (std::size_t t = 0; t < series.length(); ++t) {
        for (std::size_t f = 0; f < series.dims(); ++f) out << (f ? "," : "") << format_double(series(f, t));
        if (labels) out << ',' << (*labels)[t];
        out << '\n';
    }
}

void write_labels_csv(const std::filesystem::path& path, const LabelArray& labels) {
    auto out = open_out(path);
    out << "label\n";
    for (Label l : labels) out << l << '\n';
}

void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
    auto out = open_out(path);
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << format_double(r[c]);
        out << '\n';
    }
}

}  // namespace abimca
