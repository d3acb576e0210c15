#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geoalert {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad grid or tree dimensions (empty grid, rows/cols < 1, ...).
struct DimensionError : Error {
    using Error::Error;
};

// Out-of-range or malformed argument to an operation.
struct ParameterError : Error {
    using Error::Error;
};

// Input carries no usable probability mass.
struct DegenerateInputError : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct DuplicateError : ParseError {
    using ParseError::ParseError;
};

// An index or codeword that does not belong to the encoding.
struct LookupError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct FileError : Error {
    using Error::Error;
};

}  // namespace geoalert
