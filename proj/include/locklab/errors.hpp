#pragma once

#include <stdexcept>
#include <string>

namespace locklab {

/// Evaluation policy for constitutive queries.
///
/// Guarded: any state outside the model's locking domain is rejected with a
/// LockingViolation. Unguarded: the energy is reported as undefined (NaN)
/// past the bound, but derivative formulas keep their algebraic values
/// wherever those are real.
enum class EvalMode { Guarded, Unguarded };

/// Invalid material parameters (e.g. Kilian with a*a <= 3).
class ParameterError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Guarded evaluation requested outside the locking domain.
/// Carries the (negative or zero) locking margin of the offending state.
class LockingViolation : public std::domain_error {
public:
  LockingViolation(const std::string& what, double margin, int element = -1)
      : std::domain_error(what), margin_(margin), element_(element) {}

  double margin() const noexcept { return margin_; }
  int element() const noexcept { return element_; }

private:
  double margin_;
  int element_;
};

/// Derivative formula evaluated exactly at its pole.
class EvaluationError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Negative Jacobian at a quadrature point during assembly.
class ElementInversion : public std::runtime_error {
public:
  ElementInversion(const std::string& what, int element)
      : std::runtime_error(what), element_(element) {}

  int element() const noexcept { return element_; }

private:
  int element_;
};

}  // namespace locklab
