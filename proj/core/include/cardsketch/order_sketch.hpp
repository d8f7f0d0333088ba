#pragma once

// Maximal-term and k-th order-statistic sketches over m hash streams.
//
// Every sketch here keeps, per stream, a function of the hashed values that
// is monotone under insertion and idempotent under repetition, so the state
// is a function of the *set* of distinct items: permutation- and
// duplicate-invariant, and merge is a slot-wise maximum. Deletions are
// rejected.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "cardsketch/element.hpp"
#include "cardsketch/estimate.hpp"
#include "cardsketch/seeded_hash.hpp"

namespace cardsketch {

/// Continuous maximal-term sketch. Slot j stores log F(M_j), where M_j is the
/// running maximum of h_j over distinct items and F is the hashing CDF
/// (identity for Uniform01, 1 - e^-x for ExponentialMean1). Empty slots hold
/// -inf.
class ContinuousMaxSketch {
 public:
  explicit ContinuousMaxSketch(HashConfig cfg);

  /// Rebuilds a sketch from serialized slot values.
  static ContinuousMaxSketch from_state(HashConfig cfg,
                                        std::vector<double> log_values);

  const HashConfig& config() const noexcept { return cfg_; }
  std::uint32_t m() const noexcept { return cfg_.m; }
  std::span<const double> log_values() const noexcept { return log_f_; }

  void update(std::string_view item, std::int64_t d = 1);
  void update(const StreamElement& e) { update(e.item, e.d); }
  void update(const VariateRow& row, std::int64_t d = 1);

  void merge(const ContinuousMaxSketch& other);

  bool any_empty() const noexcept;

  /// S = -sum_j log F(M_j).
  double neg_log_sum() const;

  /// -c sum log F(M_j) ~ Gamma(m, 1) at the true c.
  double pivot(double c) const { return c * neg_log_sum(); }

  Estimate estimate(double level = 0.95) const;

  std::size_t state_bytes() const noexcept { return log_f_.size() * sizeof(double); }

  friend bool operator==(const ContinuousMaxSketch& a,
                         const ContinuousMaxSketch& b) {
    return a.cfg_ == b.cfg_ && a.log_f_ == b.log_f_;
  }

 private:
  void offer(std::uint32_t j, std::uint64_t bits);

  HashConfig cfg_;
  std::vector<double> log_f_;
  std::vector<std::int64_t> skip_key_;  // comparison cache, not part of the state
};

/// Geometric maximal-term sketch: slot j is max_i h_j(i) with h ~ G_p.
/// 0 marks an empty slot.
class GeometricMaxSketch {
 public:
  explicit GeometricMaxSketch(HashConfig cfg);
  static GeometricMaxSketch from_state(HashConfig cfg,
                                       std::vector<std::uint32_t> maxima);

  const HashConfig& config() const noexcept { return cfg_; }
  std::uint32_t m() const noexcept { return cfg_.m; }
  double q() const noexcept { return cfg_.dist.param; }
  std::span<const std::uint32_t> maxima() const noexcept { return max_; }

  void update(std::string_view item, std::int64_t d = 1);
  void update(const StreamElement& e) { update(e.item, e.d); }
  void update(const VariateRow& row, std::int64_t d = 1);

  void merge(const GeometricMaxSketch& other);

  /// Newton solution of the geometric score equation.
  Estimate estimate(double level = 0.95) const;

  /// -m / log prod(1 - q^Y_j).
  double estimate_recursive() const;

  std::size_t state_bytes() const noexcept {
    return max_.size() * sizeof(std::uint32_t);
  }

  friend bool operator==(const GeometricMaxSketch& a,
                         const GeometricMaxSketch& b) {
    return a.cfg_ == b.cfg_ && a.max_ == b.max_;
  }

 private:
  void offer(std::uint32_t j, std::uint64_t bits);
  void refresh_threshold(std::uint32_t j);

  HashConfig cfg_;
  double log_q_;
  std::vector<std::uint32_t> max_;
  std::vector<std::int64_t> skip_key_;  // keys at or below cannot raise Y_j
};

/// m-bit array; bit j is set once some item has h_j < p.
class BernoulliSketch {
 public:
  explicit BernoulliSketch(HashConfig cfg);
  static BernoulliSketch from_state(HashConfig cfg, std::vector<std::uint8_t> bits);

  const HashConfig& config() const noexcept { return cfg_; }
  std::uint32_t m() const noexcept { return cfg_.m; }
  double p() const noexcept { return cfg_.dist.param; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::uint32_t ones() const noexcept;

  void update(std::string_view item, std::int64_t d = 1);
  void update(const StreamElement& e) { update(e.item, e.d); }
  void update(const VariateRow& row, std::int64_t d = 1);

  void merge(const BernoulliSketch& other);

  Estimate estimate(double level = 0.95) const;

  std::size_t state_bytes() const noexcept { return (bits_.size() + 7) / 8; }

  friend bool operator==(const BernoulliSketch&, const BernoulliSketch&) = default;

 private:
  HashConfig cfg_;
  std::vector<std::uint8_t> bits_;
};

/// Keeps the k largest distinct Uniform01 hash values of every stream,
/// sorted in strictly descending order.
class KthOrderSketch {
 public:
  KthOrderSketch(HashConfig cfg, std::uint32_t k);
  static KthOrderSketch from_state(HashConfig cfg, std::uint32_t k,
                                   const std::vector<std::vector<double>>& lists);

  const HashConfig& config() const noexcept { return cfg_; }
  std::uint32_t m() const noexcept { return cfg_.m; }
  std::uint32_t k() const noexcept { return k_; }

  /// Current list for stream j, largest first.
  std::span<const double> top(std::uint32_t j) const;

  void update(std::string_view item, std::int64_t d = 1);
  void update(const StreamElement& e) { update(e.item, e.d); }
  void update(const VariateRow& row, std::int64_t d = 1);

  void merge(const KthOrderSketch& other);

  /// log of the k-th largest value per stream. Throws InsufficientData if a
  /// stream holds fewer than k values.
  std::vector<double> kth_log_values() const;

  Estimate estimate(double level = 0.95) const;

  std::size_t state_bytes() const noexcept { return values_.size() * sizeof(double); }

  friend bool operator==(const KthOrderSketch&, const KthOrderSketch&) = default;

 private:
  void offer(std::uint32_t j, double u);

  HashConfig cfg_;
  std::uint32_t k_;
  std::vector<double> values_;        // m * k, row j holds stream j
  std::vector<std::uint32_t> count_;  // filled entries per stream
};

// Estimators on raw sufficient statistics. The sketch methods delegate here.

/// Exact Gamma-pivot estimate from S = -sum log F(M_j) over m streams.
Estimate estimate_continuous(double neg_log_sum, std::uint32_t m, double level);

/// Closed-form large-c root k / (1 - prod y_j^(1/m)).
double kth_approximation(double neg_log_sum, std::uint32_t m, std::uint32_t k);

/// Unique root c > k - 1 of log prod y_j + sum_{i=1..k} m / (c - i + 1) = 0,
/// where neg_log_sum = -sum log y_j.
double kth_root(double neg_log_sum, std::uint32_t m, std::uint32_t k);

Estimate estimate_kth(std::span<const double> kth_log_values, std::uint32_t k,
                      double level);

/// Combines two k-th order estimates from m1 and m2 streams.
double combine_kth(double c1, std::uint32_t m1, double c2, std::uint32_t m2,
                   std::uint32_t k);

/// Bernoulli MLE log(1 - ones/m) / log(1 - p) with inverse-Fisher standard
/// error and a Clopper-Pearson interval mapped through c(P).
Estimate estimate_bernoulli(std::uint32_t ones, std::uint32_t m, double p,
                            double level);

struct GeometricStart {
  double value = 0.0;
  std::uint32_t n = 0;   // floor(log_q(1/2))
  std::uint32_t r = 0;   // #{y_j <= n}
  bool fallback = false; // true when the recursive estimator was used
};

/// Consistent starting value log(r/m) / log(1 - q^n); falls back to the
/// recursive estimator when r = 0 or r = m.
GeometricStart geometric_start(std::span<const std::uint32_t> maxima, double q);

/// Score of the geometric-maxima log-likelihood at c.
double geometric_score(std::span<const std::uint32_t> maxima, double q, double c);

Estimate estimate_geometric(std::span<const std::uint32_t> maxima, double q,
                            double level);

double estimate_geometric_recursive(std::span<const std::uint32_t> maxima,
                                    double q);

}  // namespace cardsketch
