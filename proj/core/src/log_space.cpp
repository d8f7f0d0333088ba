#include "cardsketch/log_space.hpp"

#include <numbers>
#include <utility>

#include "cardsketch/error.hpp"

namespace cardsketch {

double log_add_exp(double a, double b) noexcept {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  if (a == b) return a + std::numbers::ln2;
  return a + std::log1p(std::exp(b - a));
}

double log1m_exp(double x) noexcept {
  // Maechler's switch point keeps full relative accuracy on both sides.
  return x > -std::numbers::ln2 ? std::log(-std::expm1(x))
                                : std::log1p(-std::exp(x));
}

SignedLog SignedLog::from_log(int sign, double log_magnitude) {
  if (sign < -1 || sign > 1) fail(ErrorKind::Domain, "sign must be -1, 0 or 1");
  SignedLog out;
  if (sign == 0 || log_magnitude == -std::numeric_limits<double>::infinity()) {
    return out;
  }
  if (std::isnan(log_magnitude) || std::isinf(log_magnitude)) {
    fail(ErrorKind::Domain, "log magnitude must be finite");
  }
  out.sign_ = static_cast<std::int8_t>(sign);
  out.log_mag_ = log_magnitude;
  return out;
}

SignedLog SignedLog::from_value(double value) {
  if (value == 0.0) return {};
  return from_log(value > 0.0 ? 1 : -1, std::log(std::fabs(value)));
}

double SignedLog::value() const noexcept {
  return sign_ == 0 ? 0.0 : sign_ * std::exp(log_mag_);
}

SignedLog SignedLog::negated() const noexcept {
  SignedLog out = *this;
  out.sign_ = static_cast<std::int8_t>(-sign_);
  return out;
}

SignedLog& SignedLog::operator+=(const SignedLog& other) noexcept {
  if (other.sign_ == 0) return *this;
  if (sign_ == 0) {
    *this = other;
    return *this;
  }
  if (sign_ == other.sign_) {
    log_mag_ = log_add_exp(log_mag_, other.log_mag_);
    return *this;
  }
  if (log_mag_ == other.log_mag_) {
    *this = SignedLog{};
    return *this;
  }
  // Opposite signs: the larger magnitude keeps its sign.
  const bool this_larger = log_mag_ > other.log_mag_;
  const double hi = this_larger ? log_mag_ : other.log_mag_;
  const double lo = this_larger ? other.log_mag_ : log_mag_;
  sign_ = this_larger ? sign_ : other.sign_;
  log_mag_ = hi + log1m_exp(lo - hi);
  return *this;
}

}  // namespace cardsketch
