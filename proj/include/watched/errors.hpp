#pragma once

#include <stdexcept>
#include <string>

namespace watched {

// Bad input: violated invariants, malformed configs, grids that cannot
// support the requested horizon.
class InvalidInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical procedure failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace watched
