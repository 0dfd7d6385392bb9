#pragma once

#include <stdexcept>
#include <string>

namespace fheat {

/// Input violates an operation's stated preconditions (degenerate query,
/// bad radii ordering, unsupported combination).
class precondition_error : public std::invalid_argument {
public:
    explicit precondition_error(const std::string& what)
        : std::invalid_argument(what) {}
};

/// Requested evaluation leaves the truncated computational domain.
/// Message names the truncation half-width that would be needed.
class truncation_error : public std::domain_error {
public:
    explicit truncation_error(const std::string& what)
        : std::domain_error(what) {}
};

/// Grid or mollifier too coarse for the requested scale.
class resolution_error : public std::domain_error {
public:
    explicit resolution_error(const std::string& what)
        : std::domain_error(what) {}
};

/// A numerical backend failed (eigensolver non-convergence, singular
/// linear solve).
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what)
        : std::runtime_error(what) {}
};

} // namespace fheat
