#pragma once

#include <stdexcept>
#include <string>

namespace swarmforecast {

/// Bad input: malformed files, out-of-range arguments, shape mismatches.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Numeric failure at runtime: divergence, non-finite fitness.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace swarmforecast
