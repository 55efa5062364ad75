#pragma once

#include <stdexcept>
#include <string>

namespace nlbvp {

// Structural errors: the input violates a hypothesis of the theory (CLI exit 2).
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConditionK1Violation : public StructuralError {
 public:
  ConditionK1Violation(const std::string& what, double deviation)
      : StructuralError(what), deviation_(deviation) {}
  double deviation() const { return deviation_; }

 private:
  double deviation_;
};

class NoDependence : public StructuralError {
 public:
  using StructuralError::StructuralError;
};

// Numerical errors: the input is fine but a computation could not be
// carried out to the required accuracy (CLI exit 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ContourOnZero : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class PrecisionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularSystem : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class AmbiguousSpectrum : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Two modules disagree about something they should agree on.
class CrossCheckFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace nlbvp
