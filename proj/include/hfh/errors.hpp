#pragma once

#include <stdexcept>
#include <string>

namespace hfh {

// Bad input: schema, symmetry, positivity, preconditions. CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Eigensolver failure, unstable run, Richardson mismatch. CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requests outside the supported scale (e.g. 3D vector eigensolves).
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hfh
