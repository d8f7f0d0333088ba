#pragma once

// Method of seeding: an item's bytes, keyed by a global salt, select a
// position-addressable pseudo-random sequence. Stream j of the item reads
// counter 2j (primary lane) and, for two-uniform constructions such as the
// stable sampler, counter 2j+1 (auxiliary lane).

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace cardsketch {

enum class Marginal : std::uint8_t {
  Uniform01,
  ExponentialMean1,
  Geometric,       // param = q, P(X > x) = q^x, x = 1, 2, ...
  Bernoulli,       // param = p, X = 1{U < p}
  PositiveStable,  // param = alpha, Laplace transform exp(-lambda^alpha)
};

const char* to_string(Marginal marginal) noexcept;

struct Distribution {
  Marginal kind = Marginal::Uniform01;
  double param = 0.0;

  static Distribution uniform01() { return {Marginal::Uniform01, 0.0}; }
  static Distribution exponential() { return {Marginal::ExponentialMean1, 0.0}; }
  static Distribution geometric(double q) { return {Marginal::Geometric, q}; }
  static Distribution bernoulli(double p) { return {Marginal::Bernoulli, p}; }
  static Distribution positive_stable(double alpha) {
    return {Marginal::PositiveStable, alpha};
  }

  friend bool operator==(const Distribution&, const Distribution&) = default;
};

struct HashConfig {
  std::uint32_t m = 1;
  std::uint64_t salt = 0;
  Distribution dist;

  /// Throws Error(Domain) unless m >= 1 and the distribution parameter lies
  /// strictly inside (0,1) where one is required.
  void validate() const;

  friend bool operator==(const HashConfig&, const HashConfig&) = default;
};

namespace hashing {

/// splitmix64 output function (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// Keyed 64-bit digest of an item's bytes.
std::uint64_t item_digest(std::string_view item, std::uint64_t salt) noexcept;

/// Counter-based generator: value at position `counter` of the splitmix64
/// sequence whose state starts at `digest`.
constexpr std::uint64_t stream_bits(std::uint64_t digest,
                                    std::uint64_t counter) noexcept {
  return mix64(digest + (counter + 1) * kGolden);
}

constexpr std::uint64_t primary_counter(std::uint32_t j) noexcept {
  return 2 * static_cast<std::uint64_t>(j);
}
constexpr std::uint64_t auxiliary_counter(std::uint32_t j) noexcept {
  return 2 * static_cast<std::uint64_t>(j) + 1;
}

/// Single 64-bit hash used by the bucketed baselines. Lives on a counter far
/// away from any stream index.
constexpr std::uint64_t item_hash64(std::uint64_t digest) noexcept {
  return stream_bits(digest, ~std::uint64_t{0} >> 1);
}

/// Top 52 bits mapped to (k + 1/2) 2^-52: strictly inside (0,1), never 0 or 1.
constexpr double uniform_from_bits(std::uint64_t bits) noexcept {
  // Signed conversion is a single instruction and exact below 2^52.
  return (static_cast<double>(static_cast<std::int64_t>(bits >> 12)) + 0.5) * 0x1p-52;
}

}  // namespace hashing

/// j-th pseudo-uniform variate of `item`. Throws IndexOutOfRange if j >= m.
double uniform_stream(std::string_view item, std::uint32_t j,
                      const HashConfig& cfg);

/// -log(1 - u). Throws Domain unless 0 < u < 1.
double exponential_variate(double u);

/// Smallest x >= 1 with 1 - q^x >= u. Saturates at UINT32_MAX.
std::uint32_t geometric_variate(double u, double q);

/// log X for X ~ F_alpha via Kanter's representation, from a uniform u and an
/// independent Exponential(1) variate w.
double stable_log_variate(double u, double w, double alpha);

namespace detail {
/// Unchecked kernel of stable_log_variate for hot loops.
double stable_log_kernel(double u, double w, double alpha) noexcept;
}  // namespace detail

/// j-th variate of `item` under cfg.dist. Stable variates are returned as
/// log X; Bernoulli as 0/1; geometric as an integer-valued double.
double variate(std::string_view item, std::uint32_t j, const HashConfig& cfg);

/// Primary-lane generator output for the first m streams of one item. Lets
/// several sketches with the same salt share one pass of hashing.
class VariateRow {
 public:
  VariateRow() = default;
  VariateRow(std::string_view item, std::uint64_t salt, std::uint32_t m) {
    assign(item, salt, m);
  }

  void assign(std::string_view item, std::uint64_t salt, std::uint32_t m);

  std::uint64_t digest() const noexcept { return digest_; }
  std::uint64_t salt() const noexcept { return salt_; }
  std::uint32_t size() const noexcept {
    return static_cast<std::uint32_t>(bits_.size());
  }
  std::span<const std::uint64_t> bits() const noexcept { return bits_; }
  double uniform(std::uint32_t j) const noexcept {
    return hashing::uniform_from_bits(bits_[j]);
  }

 private:
  std::uint64_t digest_ = 0;
  std::uint64_t salt_ = 0;
  std::vector<std::uint64_t> bits_;
};

}  // namespace cardsketch
