#pragma once

#include <stdexcept>
#include <string>

namespace whf {

/// Bad input: out-of-range parameters, malformed descriptors, rejected profiles.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Partial indices with spread of two or more.
class UnstableIndices : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// Configuration document rejected; `key()` names the offending entry.
class ConfigError : public InvalidArgument {
public:
    ConfigError(std::string key, const std::string& message)
        : InvalidArgument(key.empty() ? message : "config key '" + key + "': " + message), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// A computation produced non-finite values or failed an internal consistency check.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Evaluation requested where the quadrature cannot deliver accuracy.
class AccuracyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace whf
