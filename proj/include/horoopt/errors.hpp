#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace horoopt {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A matrix function that needs positivity met an eigenvalue at or below the
/// relative floor.
class EigenvalueFloorViolation : public Error {
 public:
  EigenvalueFloorViolation(double smallest, double floor)
      : Error("eigenvalue " + std::to_string(smallest) +
              " is at or below the floor " + std::to_string(floor)),
        smallest_(smallest),
        floor_(floor) {}

  double smallest() const { return smallest_; }
  double floor() const { return floor_; }

 private:
  double smallest_;
  double floor_;
};

class NonFiniteValue : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const { return residual_; }

 private:
  double residual_;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

/// Wraps an error raised while processing online round `round` (1-based).
class RoundError : public Error {
 public:
  RoundError(std::size_t round, const std::string& what)
      : Error("round " + std::to_string(round) + ": " + what), round_(round) {}

  std::size_t round() const { return round_; }

 private:
  std::size_t round_;
};

}  // namespace horoopt
