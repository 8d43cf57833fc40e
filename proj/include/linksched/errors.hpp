#pragma once

#include <stdexcept>
#include <string>

namespace linksched {

// Invalid configuration or generator parameter. The message names the field.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed caller input (vertex out of range, NaN utility, negative arrival).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A policy produced a schedule that is not an independent set.
class FeasibilityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Problem too large for an exact routine.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Tensor shape disagreement inside the neural toolkit.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Checkpoint or config file that cannot be read back.
class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace linksched
