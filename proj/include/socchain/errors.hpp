#pragma once

#include <stdexcept>
#include <string>

namespace soc {

// Error taxonomy shared by every module. Each type maps to one failure class
// so callers (and the CLI) can report it without string matching.

struct RangeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct IndexError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Argument lies on the cut (-inf, 0] of the principal logarithm.
struct BranchError : std::domain_error {
  using std::domain_error::domain_error;
};

struct OrderError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Quadrature or root finding did not reach its tolerance within budget.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct UnknownRegime : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct IOError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace soc
