#ifndef BSBO_ERRORS_HPP
#define BSBO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bsbo {

/// Invalid configuration or caller-supplied parameters (CLI exit code 1).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent input data (CLI exit code 2).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure that survived all recovery attempts (CLI exit code 3).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// A mandatory validation check failed (CLI exit code 4).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace bsbo

#endif // BSBO_ERRORS_HPP
