#pragma once

// Stable random-projection sketch: V_j = sum_t d_t h_j(i_t) with h_j drawn
// from the positive stable law of index alpha. Each term enters as log X, and
// V_j is kept as an exact dyadic sum so that deletions cancel exactly even
// when one term exceeds the rest of the sum by hundreds of orders of
// magnitude, as happens routinely for small alpha.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "cardsketch/element.hpp"
#include "cardsketch/estimate.hpp"
#include "cardsketch/exact_sum.hpp"
#include "cardsketch/log_space.hpp"
#include "cardsketch/seeded_hash.hpp"

namespace cardsketch {

class ProjectionSketch {
 public:
  explicit ProjectionSketch(HashConfig cfg);
  static ProjectionSketch from_state(HashConfig cfg, std::vector<ExactSum> acc);

  const HashConfig& config() const noexcept { return cfg_; }
  std::uint32_t m() const noexcept { return cfg_.m; }
  double alpha() const noexcept { return cfg_.dist.param; }
  std::span<const ExactSum> exact_accumulators() const noexcept { return acc_; }
  /// V_j rounded to (sign, log|V_j|).
  std::vector<SignedLog> accumulators() const;

  /// acc_j += d * h_j(item). Negative d deletes.
  void update(std::string_view item, std::int64_t d = 1);
  void update(const StreamElement& e) { update(e.item, e.d); }
  /// Same as update(item, d) but reuses the digest and primary bits of `row`.
  void update(const VariateRow& row, std::int64_t d = 1);

  void merge(const ProjectionSketch& other);

  /// log V_j for every stream. Throws InvalidState unless every V_j > 0.
  std::vector<double> log_values() const;

  /// m / sum V_j^-alpha with a Gamma(m, 1) pivot interval.
  Estimate estimate(double level = 0.95) const;

  /// (median V / median F_alpha)^alpha.
  double median_estimate() const;

  /// Four bytes per base-2^32 digit plus a four-byte offset per stream.
  std::size_t state_bytes() const;

  friend bool operator==(const ProjectionSketch&, const ProjectionSketch&) = default;

 private:
  HashConfig cfg_;
  std::vector<ExactSum> acc_;
};

/// Estimate from log V_j values; alpha above 0.1 makes the pivot rough.
Estimate estimate_projection(std::span<const double> log_values, double alpha,
                             double level);

/// exp(alpha (median log V - log median F_alpha)); even m averages the two
/// central log values.
double estimate_projection_median(std::span<const double> log_values, double alpha);

/// log of the median of F_alpha, from 10^7 Halton(2,3) pairs pushed through
/// the stable sampler. Cached per alpha; thread-safe.
double stable_median(double alpha);

}  // namespace cardsketch
