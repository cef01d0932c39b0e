#pragma once

#include <stdexcept>
#include <string>

namespace vidchat {

// Shapes that do not line up (matmul inner dims, concat widths, ...).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Caller broke a precondition (non-scalar loss, empty sequence, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// NaN inputs, log of a non-positive value, diverged training.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input files: malformed lines, missing features, wrong feature width.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent configuration (unknown model name, embedding dim mismatch).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vidchat
