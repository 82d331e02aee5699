#pragma once

#include <stdexcept>
#include <string>

namespace ddopt {

enum class SequenceErrorKind { NonMonotonic, OutOfRange, TooClose };

std::string to_string(SequenceErrorKind kind);

/// Rejected pulse-timing input. `index()` is the offending position in the
/// input list (0-based).
class SequenceError : public std::invalid_argument {
 public:
  SequenceError(SequenceErrorKind kind, std::size_t index, const std::string& what)
      : std::invalid_argument(what), kind_(kind), index_(index) {}

  SequenceErrorKind kind() const noexcept { return kind_; }
  std::size_t index() const noexcept { return index_; }

 private:
  SequenceErrorKind kind_;
  std::size_t index_;
};

/// Argument outside the mathematical domain of a function (e.g. z < 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A spectrum table that is not a valid nonnegative density.
class InvalidSpectrum : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical procedure failed to reach its accuracy target. Carries the best
/// estimate obtained and its error bound so callers can still inspect them.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, double best_estimate, double error_bound)
      : std::runtime_error(what), best_estimate_(best_estimate), error_bound_(error_bound) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double best_estimate_;
  double error_bound_;
};

}  // namespace ddopt
