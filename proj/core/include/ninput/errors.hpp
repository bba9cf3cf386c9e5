#pragma once

#include <stdexcept>
#include <string>

namespace ninput {

/// Precondition violated by a caller (bad sizes, arity mismatch, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// retract() was asked to normalize a (numerically) zero vector.
class DegenerateRetraction : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Unknown scenario name passed to the scenario runner.
class UnknownScenario : public std::out_of_range {
 public:
  explicit UnknownScenario(const std::string& what) : std::out_of_range(what) {}
};

}  // namespace ninput
