#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace roughflow {

struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// requested derivative order or jacobian not provided by an evaluator
struct CapabilityError : std::logic_error {
  using std::logic_error::logic_error;
};

struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ToleranceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DivergenceError : std::runtime_error {
  DivergenceError(const std::string& what, double s_, double t_, std::vector<double> x_)
      : std::runtime_error(what), s(s_), t(t_), x(std::move(x_)) {}
  double s, t;
  std::vector<double> x;
};

struct CoverageError : std::runtime_error {
  CoverageError(const std::string& what, double margin)
      : std::runtime_error(what), required_margin(margin) {}
  double required_margin;
};

// an exponent or parameter inequality failed; `constraint` names it
struct ConstraintError : std::domain_error {
  ConstraintError(const std::string& constraint_, const std::string& what)
      : std::domain_error(what), constraint(constraint_) {}
  std::string constraint;
};

struct IndeterminateOrder : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace roughflow
