#pragma once

// Exact running sum of terms d * x, where each x is a positive real given by
// its logarithm and rounded once to a 53-bit dyadic rational. Inserting and
// later deleting the same term restores the previous state exactly, whatever
// was added in between; floating-point accumulators lose everything below a
// dominant term and cannot do this.

#include <cstdint>
#include <vector>

#include "cardsketch/log_space.hpp"

namespace cardsketch {

class ExactSum {
 public:
  /// Adds d * round53(exp(log_x)).
  void add(std::int64_t d, double log_x);
  void add(const ExactSum& other);

  /// -1, 0 or +1.
  int sign() const;
  /// Sign and log magnitude of the exact value, rounded to double.
  SignedLog to_signed_log() const;

  /// Canonical form: base-2^32 digits, least significant first, weight of
  /// digit i is 2^(32 (low + i)). All digits lie in [0, 2^32) except the last,
  /// which is negative for negative sums. Zero has no digits.
  std::int32_t low() const;
  std::vector<std::int64_t> digits() const;
  static ExactSum from_digits(std::int32_t low, std::vector<std::int64_t> digits);

  friend bool operator==(const ExactSum& a, const ExactSum& b);

 private:
  void normalize();
  void reserve_range(std::int64_t first, std::int64_t last);

  std::int64_t low_ = 0;
  std::vector<std::int64_t> digits_;  // carry-save between normalizations
  std::uint32_t pending_ = 0;         // adds since the last normalization
};

}  // namespace cardsketch
