#ifndef STABLEBIP_ERROR_HPP_
#define STABLEBIP_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stablebip {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a declared invariant or precondition. The CLI maps these to
// exit status 3.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A numerical procedure failed on valid input. The CLI maps these to exit
// status 4.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UnsupportedCaseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DivergingMomentError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Hypotheses of the series convergence theorem fail.
class HypothesisError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ReferenceMismatchError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Data vector outside the ball of radius r.
class RadiusError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class GeometryError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class FamilyError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class FactorizationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateWeightsError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IterationLimitError : public NumericalError {
 public:
  IterationLimitError(const std::string& what, std::vector<double> best,
                      double best_objective)
      : NumericalError(what),
        best_(std::move(best)),
        best_objective_(best_objective) {}

  const std::vector<double>& best_iterate() const { return best_; }
  double best_objective() const { return best_objective_; }

 private:
  std::vector<double> best_;
  double best_objective_;
};

}  // namespace stablebip

#endif  // STABLEBIP_ERROR_HPP_
