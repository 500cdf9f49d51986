#pragma once

#include <stdexcept>
#include <string>

namespace hhg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (e.g. tau <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Query outside tabulated / gridded data; no extrapolation is attempted.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Quadrature or series did not reach the requested accuracy.
class NumericalAccuracyError : public Error {
 public:
  NumericalAccuracyError(const std::string& what, double estimate)
      : Error(what), estimate_(estimate) {}
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

// Invalid grid, step ratio, or scenario configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A detector (transition, focus, cutoff change) found nothing in range.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

// Least-squares fit without enough support (e.g. spectral phase fit).
class FitError : public Error {
 public:
  using Error::Error;
};

// Nonfinite values appeared during a march.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, std::size_t plane)
      : Error(what), plane_(plane) {}
  std::size_t plane() const noexcept { return plane_; }

 private:
  std::size_t plane_;
};

}  // namespace hhg
