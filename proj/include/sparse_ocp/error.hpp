#pragma once

#include <stdexcept>
#include <string>

namespace sparse_ocp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (NaN entries, grid mismatch, bad shapes).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Exponential nonlinearity evaluated beyond the representable range.
class SaturationError : public Error {
 public:
  using Error::Error;
};

/// Newton iteration failed to reach the residual tolerance.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, int step) : Error(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

/// Manufactured-instance recipe without the sign structure it needs.
class DegenerateInstance : public Error {
 public:
  using Error::Error;
};

class UndefinedMultiplier : public Error {
 public:
  using Error::Error;
};

/// growth_report kept no samples inside the requested state ball.
class NoRetainedSamples : public Error {
 public:
  using Error::Error;
};

}  // namespace sparse_ocp
