#pragma once

#include <stdexcept>
#include <string>

namespace bridgelab {

// Argument outside the mathematical domain of an operation (negative radius,
// nonpositive time, state outside the state space, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A documented precondition on structured input does not hold, e.g. an
// unstable drift matrix handed to the Lyapunov solver.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical routine produced a result that failed its own validation.
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The requested bridge construction does not apply to the given spec, e.g.
// the ratio form with a vanishing denominator p_{T-s}(x, b) = 0.
class InapplicableConstruction : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace bridgelab
