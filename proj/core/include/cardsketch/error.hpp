#pragma once

#include <stdexcept>
#include <string>

namespace cardsketch {

enum class ErrorKind {
  Domain,               // parameter outside its admissible range
  IndexOutOfRange,      // stream index j >= m
  UnsupportedDeletion,  // d <= 0 fed to a maximal-term sketch
  IncompatibleSketch,   // merge of sketches with different configurations
  EmptySketch,          // estimation with an untouched slot
  DegenerateSketch,     // sufficient statistic at its boundary
  InsufficientData,     // fewer than k order statistics in some stream
  Saturation,           // every Bernoulli bit set
  InvalidState,         // projection accumulator not strictly positive
  Integrity,            // negative cumulative quantity in the exact counter
  Format,               // malformed serialized sketch or input line
  Numeric,              // iteration failed to converge
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// All Bernoulli bits are set: the MLE is unbounded, but a one-sided lower
/// confidence bound is still meaningful and is carried here.
class SaturationError : public Error {
 public:
  SaturationError(const std::string& what, double lower_bound)
      : Error(ErrorKind::Saturation, what), lower_bound_(lower_bound) {}

  double lower_bound() const noexcept { return lower_bound_; }

 private:
  double lower_bound_;
};

/// Newton iteration hit its cap. The starting value is kept so callers can
/// fall back to the consistent initial estimator.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double initial_value)
      : Error(ErrorKind::Numeric, what), initial_value_(initial_value) {}

  double initial_value() const noexcept { return initial_value_; }

 private:
  double initial_value_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace cardsketch
