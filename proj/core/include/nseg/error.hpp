#pragma once

#include <stdexcept>
#include <string>

namespace nseg {

/// Raised when a numeric or configuration parameter is outside its domain
/// (non-positive sigma, empty omega set, probability outside [0, 1], ...).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when otherwise valid inputs do not fit together, e.g. a mask and a
/// displacement field with different dimensions.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for malformed or out-of-domain data read from disk.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nseg
