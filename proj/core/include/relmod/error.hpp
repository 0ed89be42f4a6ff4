#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace relmod {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad spec, bad counts, violated preconditions.
/// The CLI maps these to exit code 1.
class InputError : public Error {
 public:
  using Error::Error;
};

/// The numerical machinery could not produce an answer.
/// The CLI maps these to exit code 2.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public NumericalError {
 public:
  NoConvergence(int iterations, double max_residual)
      : NumericalError("no convergence after " + std::to_string(iterations) +
                       " iterations (max residual " +
                       std::to_string(max_residual) + ")"),
        iterations_(iterations),
        max_residual_(max_residual) {}

  int iterations() const noexcept { return iterations_; }
  double max_residual() const noexcept { return max_residual_; }

 private:
  int iterations_;
  double max_residual_;
};

/// A fitted cell is driven to zero: the MLE does not exist for the data.
class BoundaryDivergence : public NumericalError {
 public:
  BoundaryDivergence(std::size_t cell, int iterations)
      : NumericalError("fitted value of cell " + std::to_string(cell) +
                       " diverges to zero after " +
                       std::to_string(iterations) +
                       " iterations; the MLE does not exist for these data"),
        cell_(cell),
        iterations_(iterations) {}

  std::size_t cell() const noexcept { return cell_; }
  int iterations() const noexcept { return iterations_; }

 private:
  std::size_t cell_;
  int iterations_;
};

/// Some observed subset sum is zero, so no maximum-likelihood estimate exists.
class MleNonexistence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace relmod
