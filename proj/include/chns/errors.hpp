#pragma once

#include <stdexcept>
#include <string>

namespace chns {

/// Invalid or inconsistent configuration; maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a function (e.g. |r| >= 1 for the logarithmic potential).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Fields defined on different grids were combined.
class GridMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A nonlinear or linear solve failed; maps to CLI exit code 3 when it aborts a run.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace chns
