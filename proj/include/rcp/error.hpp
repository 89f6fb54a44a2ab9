#pragma once

#include <stdexcept>
#include <string>

namespace rcp {

// Argument outside an operation's precondition (negative time, u not in (0,1), ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parameter outside the range where a closed form is defined (e.g. alpha not in (1/2,1)).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Quadrature or root finding did not reach its tolerance.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Query that the object's current state cannot answer (clock history discarded).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Configured memory or event budget exhausted.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameter combination for which a construction does not exist
// (infeasible schedule, no contraction exponent, domination condition fails).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rcp
