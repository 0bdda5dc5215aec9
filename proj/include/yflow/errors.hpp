#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace yflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two fields (or a field and a mask) live on different grids.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

class NonFiniteValue : public Error {
 public:
  NonFiniteValue(std::size_t index, double value);
  std::size_t index() const noexcept { return index_; }
  double value() const noexcept { return value_; }

 private:
  std::size_t index_;
  double value_;
};

/// A conformal factor was zero or negative at some grid point.
class PositivityViolation : public Error {
 public:
  PositivityViolation(std::size_t index, double value);
  std::size_t index() const noexcept { return index_; }
  double value() const noexcept { return value_; }

 private:
  std::size_t index_;
  double value_;
};

class EigenNonConvergence : public Error {
 public:
  EigenNonConvergence(double best_residual, int iterations);
  double best_residual() const noexcept { return best_residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double best_residual_;
  int iterations_;
};

/// The admissible window for the supersolution scale is empty.
class H2Violated : public Error {
 public:
  H2Violated(double delta_lo, double delta_hi, double c_omega);
  double delta_lo() const noexcept { return delta_lo_; }
  double delta_hi() const noexcept { return delta_hi_; }
  double c_omega() const noexcept { return c_omega_; }

 private:
  double delta_lo_;
  double delta_hi_;
  double c_omega_;
};

/// Configuration or file-format problem; the message names the field or line.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

}  // namespace yflow
