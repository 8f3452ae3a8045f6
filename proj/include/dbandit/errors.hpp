#pragma once

#include <stdexcept>
#include <string>

namespace dbandit {

// Caller broke a documented precondition (bad arm index, non-binary reward).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Invalid scenario or model parameters.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operation is not defined for this delay family (e.g. quantiles of the
// queue-based mechanism).
class UnsupportedFamily : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace dbandit
