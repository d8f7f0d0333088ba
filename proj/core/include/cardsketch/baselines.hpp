#pragma once

// Stochastic-averaging competitors: LogLog, HyperLogLog and MinCount. Items
// go to bucket b given by the top log2(m) bits of a single 64-bit hash; the
// remaining bits drive the register.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "cardsketch/element.hpp"
#include "cardsketch/estimate.hpp"
#include "cardsketch/seeded_hash.hpp"

namespace cardsketch {

enum class BaselineKind : std::uint8_t { LogLog, HyperLogLog, MinCount };

const char* to_string(BaselineKind kind) noexcept;

/// Asymptotic relative efficiency used for the reported standard error.
double baseline_are(BaselineKind kind) noexcept;

class RegisterSketch {
 public:
  static constexpr std::uint32_t kMinCountOrder = 3;

  /// m must be a power of two in [1, 2^16].
  RegisterSketch(BaselineKind kind, std::uint32_t m, std::uint64_t salt);

  static RegisterSketch from_ranks(BaselineKind kind, std::uint64_t salt,
                                   std::vector<std::uint8_t> ranks);
  static RegisterSketch from_minima(std::uint64_t salt,
                                    const std::vector<std::vector<double>>& minima);

  BaselineKind kind() const noexcept { return kind_; }
  std::uint32_t m() const noexcept { return m_; }
  std::uint64_t salt() const noexcept { return salt_; }

  /// Rank registers (LogLog, HyperLogLog).
  std::span<const std::uint8_t> ranks() const noexcept { return ranks_; }
  /// Smallest uniforms of bucket b, ascending (MinCount).
  std::span<const double> minima(std::uint32_t b) const;

  void update(std::string_view item, std::int64_t d = 1);
  void update(const StreamElement& e) { update(e.item, e.d); }
  void update(const VariateRow& row, std::int64_t d = 1);

  void merge(const RegisterSketch& other);

  Estimate estimate(double level = 0.95) const;

  std::size_t state_bytes() const noexcept {
    return ranks_.size() + minima_.size() * sizeof(double);
  }

  friend bool operator==(const RegisterSketch&, const RegisterSketch&) = default;

 private:
  void offer(std::uint64_t hash);
  void offer_minimum(std::uint32_t b, double u);

  BaselineKind kind_;
  std::uint32_t m_;
  std::uint32_t bucket_bits_;
  std::uint64_t salt_;
  std::vector<std::uint8_t> ranks_;
  std::vector<double> minima_;       // m * 3, ascending per bucket
  std::vector<std::uint8_t> filled_; // entries used per bucket
};

/// LogLog bias constant alpha_m = (Gamma(-1/m) (1 - 2^(1/m)) / ln 2)^-m.
double loglog_alpha(std::uint32_t m);

/// HyperLogLog bias constant.
double hyperloglog_alpha(std::uint32_t m);

}  // namespace cardsketch
