#pragma once

#include <stdexcept>

namespace mascot {

/// Operand extents do not line up (matmul inner dims, elementwise shapes, frame sizes).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configuration value is out of its legal range.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A caller broke an operation's precondition (non-binary gate, non-scalar loss, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed user-supplied data (captions, index ranges, empty sequences).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file on disk could not be parsed or does not match the expected layout.
class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mascot
