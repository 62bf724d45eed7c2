#pragma once

#include <stdexcept>
#include <string>

namespace fsl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A time step violated the convective CFL restriction.
class CflError : public Error {
 public:
  using Error::Error;
};

/// The solver produced a non-finite value.
class NonFiniteError : public Error {
 public:
  NonFiniteError(const std::string& what, long step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

}  // namespace fsl
