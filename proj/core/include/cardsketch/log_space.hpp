#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace cardsketch {

/// Real number stored as (sign, log|x|). Zero is sign 0 with log|x| = -inf.
class SignedLog {
 public:
  constexpr SignedLog() = default;

  static SignedLog from_log(int sign, double log_magnitude);
  static SignedLog from_value(double value);

  int sign() const noexcept { return sign_; }
  double log_magnitude() const noexcept { return log_mag_; }
  bool is_zero() const noexcept { return sign_ == 0; }

  /// sign * exp(log|x|); overflows to +-inf for large magnitudes.
  double value() const noexcept;

  SignedLog negated() const noexcept;

  SignedLog& operator+=(const SignedLog& other) noexcept;
  friend SignedLog operator+(SignedLog lhs, const SignedLog& rhs) noexcept {
    lhs += rhs;
    return lhs;
  }

  friend bool operator==(const SignedLog&, const SignedLog&) = default;

 private:
  std::int8_t sign_ = 0;
  double log_mag_ = -std::numeric_limits<double>::infinity();
};

/// log(exp(a) + exp(b)).
double log_add_exp(double a, double b) noexcept;

/// log(1 - exp(x)) for x < 0.
double log1m_exp(double x) noexcept;

}  // namespace cardsketch
