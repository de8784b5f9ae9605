#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace smlmc {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad parameters or arguments (a usage error at the command line).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Raised for the high-density, short-off-time regime that is never simulated.
class ExcludedRegimeError : public Error {
public:
    using Error::Error;
};

/// Base for everything wrong with data on disk or data handed in by a caller.
class DataError : public Error {
public:
    using Error::Error;
};

class IoError : public DataError {
public:
    using DataError::DataError;
};

class DigestMismatchError : public DataError {
public:
    DigestMismatchError(std::string file, const std::string& expected,
                        const std::string& actual)
        : DataError("digest mismatch for " + file + ": manifest has " + expected +
                    ", file hashes to " + actual),
          file_(std::move(file)) {}

    const std::string& file() const noexcept { return file_; }

private:
    std::string file_;
};

class ParseError : public DataError {
public:
    ParseError(std::string file, std::size_t line, const std::string& what)
        : DataError(file + ":" + std::to_string(line) + ": " + what),
          file_(std::move(file)),
          line_(line) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

class VersionMismatchError : public DataError {
public:
    using DataError::DataError;
};

/// Fixed-N rejection sampling gave up on a slot.
class RejectionLimitError : public DataError {
public:
    using DataError::DataError;
};

}  // namespace smlmc
