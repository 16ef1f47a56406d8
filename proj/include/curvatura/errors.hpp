#pragma once

#include <stdexcept>
#include <string>

namespace curvatura {

/// Invalid or inconsistent geometric data (inadmissible cap, non-immersion,
/// point off the model quadric, ...).
struct GeometryError : std::runtime_error {
    explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed configuration input.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Iterative method failed to converge within its budget.
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace curvatura
