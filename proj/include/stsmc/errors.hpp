#pragma once

#include <stdexcept>
#include <string>

namespace stsmc {

/// Invalid configuration or malformed input (CLI exit code 1).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A trajectory left the finite-state envelope (CLI exit code 2).
struct DivergenceError : std::runtime_error {
    explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// Trajectory too short for the requested analysis.
struct InsufficientDataError : std::runtime_error {
    explicit InsufficientDataError(const std::string& what) : std::runtime_error(what) {}
};

/// The tuning bound W1 is undefined for the given gains (k1 <= sqrt(2(L-k2))).
struct BoundInapplicableError : std::domain_error {
    explicit BoundInapplicableError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace stsmc
