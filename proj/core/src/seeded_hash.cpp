#include "cardsketch/seeded_hash.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cardsketch/error.hpp"

namespace cardsketch {

const char* to_string(Marginal marginal) noexcept {
  switch (marginal) {
    case Marginal::Uniform01: return "uniform";
    case Marginal::ExponentialMean1: return "exponential";
    case Marginal::Geometric: return "geometric";
    case Marginal::Bernoulli: return "bernoulli";
    case Marginal::PositiveStable: return "stable";
  }
  return "unknown";
}

void HashConfig::validate() const {
  if (m < 1) fail(ErrorKind::Domain, "m must be >= 1");
  switch (dist.kind) {
    case Marginal::Uniform01:
    case Marginal::ExponentialMean1:
      return;
    case Marginal::Geometric:
    case Marginal::Bernoulli:
    case Marginal::PositiveStable:
      if (!(dist.param > 0.0 && dist.param < 1.0)) {
        fail(ErrorKind::Domain, std::string(to_string(dist.kind)) +
                                    " parameter must lie strictly inside (0,1)");
      }
      return;
  }
}

namespace hashing {

std::uint64_t item_digest(std::string_view item, std::uint64_t salt) noexcept {
  const auto* bytes = reinterpret_cast<const unsigned char*>(item.data());
  std::size_t n = item.size();
  std::uint64_t h = mix64(salt ^ (0x2545f4914f6cdd1dULL * (n + 1)));
  while (n >= 8) {
    std::uint64_t word = 0;
    for (int b = 7; b >= 0; --b) word = (word << 8) | bytes[b];
    h = mix64(h ^ word) + kGolden;
    bytes += 8;
    n -= 8;
  }
  std::uint64_t tail = 0;
  for (std::size_t b = n; b-- > 0;) tail = (tail << 8) | bytes[b];
  h = mix64(h ^ tail ^ (static_cast<std::uint64_t>(n) << 56));
  return mix64(h + item.size());
}

}  // namespace hashing

double uniform_stream(std::string_view item, std::uint32_t j,
                      const HashConfig& cfg) {
  if (j >= cfg.m) {
    fail(ErrorKind::IndexOutOfRange, "stream index " + std::to_string(j) +
                                         " out of range for m=" +
                                         std::to_string(cfg.m));
  }
  const auto digest = hashing::item_digest(item, cfg.salt);
  return hashing::uniform_from_bits(
      hashing::stream_bits(digest, hashing::primary_counter(j)));
}

double exponential_variate(double u) {
  if (!(u > 0.0 && u < 1.0)) fail(ErrorKind::Domain, "u must lie in (0,1)");
  return -std::log1p(-u);
}

std::uint32_t geometric_variate(double u, double q) {
  if (!(u > 0.0 && u < 1.0)) fail(ErrorKind::Domain, "u must lie in (0,1)");
  if (!(q > 0.0 && q < 1.0)) fail(ErrorKind::Domain, "q must lie in (0,1)");
  const double x = std::ceil(std::log1p(-u) / std::log(q));
  if (x < 1.0) return 1;
  if (x >= static_cast<double>(std::numeric_limits<std::uint32_t>::max())) {
    return std::numeric_limits<std::uint32_t>::max();
  }
  return static_cast<std::uint32_t>(x);
}

double stable_log_variate(double u, double w, double alpha) {
  if (!(u > 0.0 && u < 1.0)) fail(ErrorKind::Domain, "u must lie in (0,1)");
  if (!(w > 0.0)) fail(ErrorKind::Domain, "w must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    fail(ErrorKind::Domain, "alpha must lie in (0,1)");
  }
  return detail::stable_log_kernel(u, w, alpha);
}

namespace detail {

double stable_log_kernel(double u, double w, double alpha) noexcept {
  // X = sin(a pi u) / sin(pi u)^(1/a) * (sin((1-a) pi u) / w)^((1-a)/a)
  // log X = (1/a) log(s2 / (w s1)) + log(s0 w / s2)
  constexpr double pi = std::numbers::pi;
  const double s0 = std::sin(alpha * pi * u);
  const double s1 = std::sin(pi * std::min(u, 1.0 - u));
  const double s2 = std::sin((1.0 - alpha) * pi * u);
  return std::log(s2 / (w * s1)) / alpha + std::log(s0 * w / s2);
}

}  // namespace detail

double variate(std::string_view item, std::uint32_t j, const HashConfig& cfg) {
  cfg.validate();
  const double u = uniform_stream(item, j, cfg);
  switch (cfg.dist.kind) {
    case Marginal::Uniform01: return u;
    case Marginal::ExponentialMean1: return exponential_variate(u);
    case Marginal::Geometric: return geometric_variate(u, cfg.dist.param);
    case Marginal::Bernoulli: return u < cfg.dist.param ? 1.0 : 0.0;
    case Marginal::PositiveStable: {
      const auto digest = hashing::item_digest(item, cfg.salt);
      const double u2 = hashing::uniform_from_bits(
          hashing::stream_bits(digest, hashing::auxiliary_counter(j)));
      return stable_log_variate(u, exponential_variate(u2), cfg.dist.param);
    }
  }
  return u;
}

void VariateRow::assign(std::string_view item, std::uint64_t salt,
                        std::uint32_t m) {
  salt_ = salt;
  digest_ = hashing::item_digest(item, salt);
  bits_.resize(m);
  for (std::uint32_t j = 0; j < m; ++j) {
    bits_[j] = hashing::stream_bits(digest_, hashing::primary_counter(j));
  }
}

}  // namespace cardsketch
