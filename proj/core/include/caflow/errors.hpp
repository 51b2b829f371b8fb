#pragma once

#include <stdexcept>
#include <string>

namespace caflow {

// Bad user input: malformed tables, inconsistent probabilities, invalid
// grids. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// An exact computation would exceed its configured state/transition cap.
// Callers either fall back to a Monte Carlo path or surface exit code 3.
class BudgetError : public std::runtime_error {
public:
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// A caller violated an operation precondition (window too small, cone not
// covered, ...). Treated as a usage error, not a recoverable condition.
class PreconditionError : public std::runtime_error {
public:
    explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace caflow
