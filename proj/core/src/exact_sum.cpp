#include "cardsketch/exact_sum.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "cardsketch/error.hpp"

namespace cardsketch {

namespace {

constexpr std::int64_t kMask = 0xffffffffLL;
// Each add puts less than 2^32 into a digit; 2^30 adds keep int64 safe.
constexpr std::uint32_t kNormalizeEvery = 1u << 30;

__extension__ typedef unsigned __int128 u128;

std::int64_t floor_div32(std::int64_t b) { return b >= 0 ? b / 32 : -((31 - b) / 32); }

}  // namespace

void ExactSum::reserve_range(std::int64_t first, std::int64_t last) {
  if (digits_.empty()) {
    low_ = first;
    digits_.assign(static_cast<std::size_t>(last - first), 0);
    return;
  }
  if (first < low_) {
    digits_.insert(digits_.begin(), static_cast<std::size_t>(low_ - first), 0);
    low_ = first;
  }
  const auto need = static_cast<std::size_t>(last - low_);
  if (need > digits_.size()) digits_.resize(need, 0);
}

void ExactSum::add(std::int64_t d, double log_x) {
  if (d == 0) return;
  if (!std::isfinite(log_x)) fail(ErrorKind::Domain, "term logarithm must be finite");
  // x = F 2^(e-52) with F an exact 53-bit integer. Inside the normal double
  // range the fields come straight from exp(log_x); outside it, from a
  // rescaled exp.
  std::int64_t e;
  std::uint64_t mant;
  if (log_x > -700.0 && log_x < 700.0) {
    const auto bits = std::bit_cast<std::uint64_t>(std::exp(log_x));
    e = static_cast<std::int64_t>(bits >> 52) - 1023;
    mant = (bits & ((std::uint64_t{1} << 52) - 1)) | (std::uint64_t{1} << 52);
  } else {
    e = static_cast<std::int64_t>(std::floor(log_x / std::numbers::ln2));
    double f = std::exp(log_x - static_cast<double>(e) * std::numbers::ln2);
    if (f >= 2.0) { f *= 0.5; ++e; }
    if (f < 1.0) { f *= 2.0; --e; }
    mant = static_cast<std::uint64_t>(std::ldexp(f, 52));
  }
  const std::uint64_t mag = d > 0 ? static_cast<std::uint64_t>(d)
                                  : static_cast<std::uint64_t>(-(d + 1)) + 1;
  const u128 p = static_cast<u128>(mant) * mag;  // < 2^116

  const std::int64_t bit = e - 52;
  const std::int64_t k = floor_div32(bit);
  const auto s = static_cast<unsigned>(bit - 32 * k);
  const auto lo = static_cast<std::uint64_t>(p);
  const auto hi = static_cast<std::uint64_t>(p >> 64);
  const std::uint64_t w0 = lo << s;
  const std::uint64_t w1 = (hi << s) | (s ? lo >> (64 - s) : 0);
  const std::uint64_t w2 = s ? hi >> (64 - s) : 0;
  const std::uint64_t chunks[5] = {w0 & kMask, w0 >> 32, w1 & kMask, w1 >> 32, w2};

  reserve_range(k, k + 5);
  std::int64_t* base = digits_.data() + (k - low_);
  if (d > 0) {
    for (int i = 0; i < 5; ++i) base[i] += static_cast<std::int64_t>(chunks[i]);
  } else {
    for (int i = 0; i < 5; ++i) base[i] -= static_cast<std::int64_t>(chunks[i]);
  }
  if (++pending_ >= kNormalizeEvery) normalize();
}

void ExactSum::add(const ExactSum& other) {
  if (other.digits_.empty()) return;
  ExactSum o = other;
  o.normalize();
  if (o.digits_.empty()) return;
  normalize();
  reserve_range(o.low_, o.low_ + static_cast<std::int64_t>(o.digits_.size()));
  for (std::size_t i = 0; i < o.digits_.size(); ++i) {
    digits_[static_cast<std::size_t>(o.low_ - low_) + i] += o.digits_[i];
  }
  normalize();
}

void ExactSum::normalize() {
  pending_ = 0;
  std::int64_t carry = 0;
  for (auto& dg : digits_) {
    const std::int64_t v = dg + carry;
    dg = v & kMask;
    carry = v >> 32;  // arithmetic shift: floor division
  }
  while (carry != 0 && carry != -1) {
    digits_.push_back(carry & kMask);
    carry >>= 32;
  }
  if (carry == -1) digits_.push_back(-1);
  // Fold a leading -1 into a negative top digit where possible.
  while (digits_.size() > 1 && digits_.back() == -1 &&
         digits_[digits_.size() - 2] >= (1LL << 31)) {
    digits_.pop_back();
    digits_.back() -= (1LL << 32);
  }
  while (!digits_.empty() && digits_.back() == 0) digits_.pop_back();
  std::size_t zeros = 0;
  while (zeros < digits_.size() && digits_[zeros] == 0) ++zeros;
  if (zeros > 0) {
    digits_.erase(digits_.begin(), digits_.begin() + static_cast<std::ptrdiff_t>(zeros));
    low_ += static_cast<std::int64_t>(zeros);
  }
  if (digits_.empty()) low_ = 0;
}

int ExactSum::sign() const {
  ExactSum c = *this;
  c.normalize();
  if (c.digits_.empty()) return 0;
  return c.digits_.back() < 0 ? -1 : 1;
}

SignedLog ExactSum::to_signed_log() const {
  ExactSum c = *this;
  c.normalize();
  if (c.digits_.empty()) return {};
  const int sgn = c.digits_.back() < 0 ? -1 : 1;
  if (sgn < 0) {
    for (auto& dg : c.digits_) dg = -dg;
    c.normalize();
  }
  // Top three digits carry at least 64 significant bits.
  const auto n = static_cast<std::int64_t>(c.digits_.size());
  long double top = 0.0L;
  const std::int64_t first = std::max<std::int64_t>(0, n - 3);
  for (std::int64_t i = n - 1; i >= first; --i) {
    top = top * 4294967296.0L + static_cast<long double>(c.digits_[static_cast<std::size_t>(i)]);
  }
  const double log_mag = static_cast<double>(
      std::log(top) + static_cast<long double>(32 * (c.low_ + first)) * std::numbers::ln2_v<long double>);
  return SignedLog::from_log(sgn, log_mag);
}

std::int32_t ExactSum::low() const {
  ExactSum c = *this;
  c.normalize();
  return static_cast<std::int32_t>(c.low_);
}

std::vector<std::int64_t> ExactSum::digits() const {
  ExactSum c = *this;
  c.normalize();
  return c.digits_;
}

ExactSum ExactSum::from_digits(std::int32_t low, std::vector<std::int64_t> digits) {
  for (auto dg : digits) {
    if (dg < -(1LL << 31) || dg >= (1LL << 32)) {
      fail(ErrorKind::Format, "exact sum digit out of range");
    }
  }
  ExactSum s;
  s.low_ = low;
  s.digits_ = digits;
  s.normalize();
  if (s.digits_ != digits || (!digits.empty() && s.low_ != low)) {
    fail(ErrorKind::Format, "exact sum digits are not in canonical form");
  }
  return s;
}

bool operator==(const ExactSum& a, const ExactSum& b) {
  ExactSum x = a;
  ExactSum y = b;
  x.normalize();
  y.normalize();
  return x.low_ == y.low_ && x.digits_ == y.digits_;
}

}  // namespace cardsketch
