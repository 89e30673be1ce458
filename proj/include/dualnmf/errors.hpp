#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dualnmf {

// Base class for everything this library throws.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidConfig : Error {
    using Error::Error;
};

// A scalar argument that must be strictly positive was not.
struct NonPositiveArgument : Error {
    using Error::Error;
};

// An evaluation overflowed or otherwise produced NaN/Inf.
struct NonFiniteResult : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

// A factor column (or row) sum collapsed to the epsilon floor; the
// multiplicative update is undefined there.
struct DegenerateFactor : Error {
    using Error::Error;
};

struct AllRestartsFailed : Error {
    using Error::Error;
};

// R-squared is undefined for (near-)constant input matrices.
struct ConstantMatrix : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(std::size_t row, std::size_t col, std::string token,
               const std::string& what)
        : Error("parse error at (" + std::to_string(row) + "," +
                std::to_string(col) + ") token '" + token + "': " + what),
          row(row), col(col), token(std::move(token)) {}
    explicit ParseError(const std::string& what)
        : Error("parse error: " + what), row(0), col(0) {}
    std::size_t row;  // 1-based matrix coordinates; 0 if not entry-specific
    std::size_t col;
    std::string token;
};

struct NegativeEntry : Error {
    NegativeEntry(std::size_t row, std::size_t col, double value)
        : Error("negative entry " + std::to_string(value) + " at (" +
                std::to_string(row) + "," + std::to_string(col) + ")"),
          row(row), col(col), value(value) {}
    std::size_t row;
    std::size_t col;
    double value;
};

struct RaggedRows : Error {
    RaggedRows(std::size_t row, std::size_t expected, std::size_t got)
        : Error("ragged row " + std::to_string(row) + ": expected " +
                std::to_string(expected) + " fields, got " +
                std::to_string(got)),
          row(row), expected(expected), got(got) {}
    std::size_t row;  // 1-based data row
    std::size_t expected;
    std::size_t got;
};

struct WriteFailure : Error {
    using Error::Error;
};

}  // namespace dualnmf
