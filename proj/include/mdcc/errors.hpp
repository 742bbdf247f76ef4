#pragma once

#include <stdexcept>
#include <string>

namespace mdcc {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyMatrix : public Error {
 public:
  using Error::Error;
};

class NonStochasticRow : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class EmptySequence : public Error {
 public:
  using Error::Error;
};

class NegativeRho : public Error {
 public:
  using Error::Error;
};

/// Iteration budget exhausted before the requested tolerance was reached.
/// Carries the best bracket (or gap) achieved so far.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, double best_gap)
      : Error(what), best_gap_(best_gap) {}
  double best_gap() const { return best_gap_; }

 private:
  double best_gap_;
};

class InfeasiblePolytope : public Error {
 public:
  using Error::Error;
};

class AlphabetTooLarge : public Error {
 public:
  using Error::Error;
};

class ZeroDispersion : public Error {
 public:
  using Error::Error;
};

class ScheduleViolatesEq7 : public Error {
 public:
  using Error::Error;
};

class EnumerationTooLarge : public Error {
 public:
  using Error::Error;
};

class NonIntegralComposition : public Error {
 public:
  using Error::Error;
};

}  // namespace mdcc
