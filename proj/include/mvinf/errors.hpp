#pragma once

#include <stdexcept>
#include <string>

namespace mvinf {

/// Configuration, file format, or I/O problem. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file content; message carries "path:line".
class ParseError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Numerical failure (divergence, non-finite objective). Maps to CLI exit code 1.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mvinf
