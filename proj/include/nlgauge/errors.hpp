#pragma once

#include <stdexcept>
#include <string>

namespace nlgauge {

/// Invalid or incomplete experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The integration produced non-finite values or lost normalization.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A checked precondition or invariant of an experiment did not hold.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nlgauge
