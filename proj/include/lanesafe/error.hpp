#pragma once

#include <stdexcept>
#include <string>

namespace lanesafe {

/// Shapes or dimensions that do not chain (layer sizes, traces, batches).
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A value is out of its allowed domain (non-finite, out of bounds, negative cost).
class ValidationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Configuration that cannot be realized (bad keys, infeasible traffic density).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Calling an operation in a state where it is not allowed (stepping a finished episode).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// File system failures, carrying the offending path in the message.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lanesafe
