#pragma once

#include <stdexcept>
#include <string>

namespace crus {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input data; carries the offending row/column when known.
class DataError : public Error {
public:
    DataError(const std::string& message, long row = -1, std::string column = {})
        : Error(format(message, row, column)), row_(row), column_(std::move(column)) {}

    long row() const noexcept { return row_; }
    const std::string& column() const noexcept { return column_; }

private:
    static std::string format(const std::string& message, long row, const std::string& column) {
        std::string out;
        if (row >= 0) out += "row " + std::to_string(row);
        if (!column.empty()) out += (out.empty() ? "column '" : ", column '") + column + "'";
        return out.empty() ? message : out + ": " + message;
    }

    long row_;
    std::string column_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace crus
