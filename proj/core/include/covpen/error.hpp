#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace covpen {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An argument lies outside the domain of the function (|rho| > 1, x = 0 for
// the product density, S odd for CSCV, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Not enough observations to build a design, a window, or a statistic.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

// Design matrix whose condition number exceeds the OLS threshold.
class RankDeficientError : public Error {
public:
    using Error::Error;
};

// Numerically degenerate input: zero variance, a TLS shift that closes the
// interlacing gap, a constant strategy row.
class DegenerateError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace covpen
