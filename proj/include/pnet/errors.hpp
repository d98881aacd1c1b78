#pragma once

#include <stdexcept>
#include <string>

namespace pnet {

/// Malformed input: bad parameters, infeasible strategies, bad configs.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed to reach its stopping criterion.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A checked hypothesis or predicted inequality did not hold.
class VerdictFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pnet
