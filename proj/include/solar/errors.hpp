#pragma once

#include <stdexcept>
#include <string>

namespace solar {

/// A numerical failure during a run (non-finite values, failed bracketing).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The state left the manifold on which the transformed system is smooth
/// (a non-positive x while the exponent gamma is not a positive integer).
class ManifoldError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace solar
