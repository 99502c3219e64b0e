#pragma once

#include <stdexcept>
#include <string>

namespace allax {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value hit a singular set: |1-qr| below floor, z at a pole, a vanishing
/// boundary denominator, a gauge or recursion singularity.
class SingularError : public Error {
 public:
  using Error::Error;
};

/// Invalid input: parameter constraints violated, malformed configuration,
/// index out of range.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed its own quality gate: extraction residual
/// over tolerance, ill-conditioned solve, blow-up during integration.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace allax
