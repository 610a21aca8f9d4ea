#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace abimca {

// Invalid arguments are reported with std::invalid_argument. The types below
// cover the remaining failure classes the CLI maps to distinct exit codes.

/// Malformed input file. Carries the 1-based row and column of the offending cell
/// (0 when the error is not tied to a cell).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
        : std::runtime_error(what), row_(row), column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

/// Unknown algorithm/dataset ids, missing baselines, inconsistent settings.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite values produced during integration or training.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what, long step = -1)
        : std::runtime_error(what), step_(step) {}

    /// Time index at which the failure happened, -1 if not applicable.
    long step() const noexcept { return step_; }

private:
    long step_;
};

}  // namespace abimca
