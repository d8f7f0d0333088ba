#include "cardsketch/order_sketch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cardsketch/error.hpp"
#include "cardsketch/stats.hpp"
#include "scan.hpp"

namespace cardsketch {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_insertion(std::int64_t d) {
  if (d <= 0) {
    fail(ErrorKind::UnsupportedDeletion,
         "maximal-term sketches accept only positive quantities (d=" +
             std::to_string(d) + ")");
  }
}

void require_same_config(const HashConfig& a, const HashConfig& b) {
  if (!(a == b)) {
    fail(ErrorKind::IncompatibleSketch,
         "cannot merge sketches with different m, distribution or salt");
  }
}

void require_row(const VariateRow& row, const HashConfig& cfg) {
  if (row.salt() != cfg.salt || row.size() < cfg.m) {
    fail(ErrorKind::IncompatibleSketch,
         "variate row was hashed with a different salt or fewer streams");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ContinuousMaxSketch

ContinuousMaxSketch::ContinuousMaxSketch(HashConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  if (cfg_.dist.kind != Marginal::Uniform01 &&
      cfg_.dist.kind != Marginal::ExponentialMean1) {
    fail(ErrorKind::Domain,
         "continuous maximal-term sketch needs uniform or exponential hashing");
  }
  log_f_.assign(cfg_.m, kNegInf);
  skip_key_.assign(cfg_.m, -1);
}

ContinuousMaxSketch ContinuousMaxSketch::from_state(
    HashConfig cfg, std::vector<double> log_values) {
  ContinuousMaxSketch s(cfg);
  if (log_values.size() != cfg.m) {
    fail(ErrorKind::Format, "slot count does not match m");
  }
  for (std::uint32_t j = 0; j < cfg.m; ++j) {
    const double v = log_values[j];
    if (std::isnan(v) || v > 0.0 || v == std::numeric_limits<double>::infinity()) {
      fail(ErrorKind::Format, "continuous slot must be log of a probability");
    }
    s.log_f_[j] = v;
    // F(M) tracks the driving uniform up to rounding; stay below it so the
    // cache never suppresses an update.
    s.skip_key_[j] =
        v == kNegInf ? -1
                     : static_cast<std::int64_t>(
                           std::floor(std::exp(v) * (1.0 - 1e-9) * 0x1p52 - 0.5));
  }
  return s;
}

void ContinuousMaxSketch::offer(std::uint32_t j, std::uint64_t bits) {
  const double u = hashing::uniform_from_bits(bits);
  skip_key_[j] = std::max(skip_key_[j], detail::uniform_key(bits));
  double lv;
  if (cfg_.dist.kind == Marginal::Uniform01) {
    lv = std::log(u);
  } else {
    const double x = -std::log1p(-u);
    lv = std::log(-std::expm1(-x));
  }
  log_f_[j] = std::max(log_f_[j], lv);
}

void ContinuousMaxSketch::update(std::string_view item, std::int64_t d) {
  require_insertion(d);
  update(VariateRow(item, cfg_.salt, cfg_.m), d);
}

void ContinuousMaxSketch::update(const VariateRow& row, std::int64_t d) {
  require_insertion(d);
  require_row(row, cfg_);
  const auto bits = row.bits();
  detail::scan_exceeding(bits, skip_key_.data(), cfg_.m,
                         [&](std::uint32_t j) { offer(j, bits[j]); });
}

void ContinuousMaxSketch::merge(const ContinuousMaxSketch& other) {
  require_same_config(cfg_, other.cfg_);
  for (std::uint32_t j = 0; j < cfg_.m; ++j) {
    log_f_[j] = std::max(log_f_[j], other.log_f_[j]);
    skip_key_[j] = std::max(skip_key_[j], other.skip_key_[j]);
  }
}

bool ContinuousMaxSketch::any_empty() const noexcept {
  return std::any_of(log_f_.begin(), log_f_.end(),
                     [](double v) { return v == kNegInf; });
}

double ContinuousMaxSketch::neg_log_sum() const {
  if (any_empty()) fail(ErrorKind::EmptySketch, "sketch has an empty stream");
  double s = 0.0;
  for (double v : log_f_) s -= v;
  return s;
}

Estimate ContinuousMaxSketch::estimate(double level) const {
  return estimate_continuous(neg_log_sum(), cfg_.m, level);
}

Estimate estimate_continuous(double neg_log_sum, std::uint32_t m, double level) {
  check_level(level);
  if (m < 1) fail(ErrorKind::Domain, "m must be >= 1");
  if (!(neg_log_sum > 0.0)) {
    fail(ErrorKind::DegenerateSketch,
         "sum of log F(M_j) is zero: every slot sits at the supremum");
  }
  const double shape = static_cast<double>(m);
  Estimate e;
  e.c_hat = shape / neg_log_sum;
  e.std_error = e.c_hat / std::sqrt(shape);
  e.ci_lower = stats::gamma_quantile(shape, 0.5 - 0.5 * level) / neg_log_sum;
  e.ci_upper = stats::gamma_quantile(shape, 0.5 + 0.5 * level) / neg_log_sum;
  // The Gamma median sits below its mean, so very low levels could exclude
  // c_hat; widen to keep lower <= c_hat <= upper.
  e.ci_lower = std::min(e.ci_lower, e.c_hat);
  e.ci_upper = std::max(e.ci_upper, e.c_hat);
  e.level = level;
  e.estimator = EstimatorId::MaxContinuous;
  e.m = m;
  return e;
}

// ---------------------------------------------------------------------------
// BernoulliSketch

BernoulliSketch::BernoulliSketch(HashConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  if (cfg_.dist.kind != Marginal::Bernoulli) {
    fail(ErrorKind::Domain, "Bernoulli sketch needs Bernoulli(p) hashing");
  }
  bits_.assign(cfg_.m, 0);
}

BernoulliSketch BernoulliSketch::from_state(HashConfig cfg,
                                            std::vector<std::uint8_t> bits) {
  BernoulliSketch s(cfg);
  if (bits.size() != cfg.m) fail(ErrorKind::Format, "bit count does not match m");
  for (auto b : bits) {
    if (b > 1) fail(ErrorKind::Format, "Bernoulli slot must be 0 or 1");
  }
  s.bits_ = std::move(bits);
  return s;
}

std::uint32_t BernoulliSketch::ones() const noexcept {
  return static_cast<std::uint32_t>(std::count(bits_.begin(), bits_.end(), 1));
}

void BernoulliSketch::update(std::string_view item, std::int64_t d) {
  require_insertion(d);
  const auto digest = hashing::item_digest(item, cfg_.salt);
  const double p = cfg_.dist.param;
  for (std::uint32_t j = 0; j < cfg_.m; ++j) {
    const double u = hashing::uniform_from_bits(
        hashing::stream_bits(digest, hashing::primary_counter(j)));
    if (u < p) bits_[j] = 1;
  }
}

void BernoulliSketch::update(const VariateRow& row, std::int64_t d) {
  require_insertion(d);
  require_row(row, cfg_);
  const double p = cfg_.dist.param;
  for (std::uint32_t j = 0; j < cfg_.m; ++j) {
    if (row.uniform(j) < p) bits_[j] = 1;
  }
}

void BernoulliSketch::merge(const BernoulliSketch& other) {
  require_same_config(cfg_, other.cfg_);
  for (std::uint32_t j = 0; j < cfg_.m; ++j) bits_[j] |= other.bits_[j];
}

Estimate BernoulliSketch::estimate(double level) const {
  return estimate_bernoulli(ones(), cfg_.m, cfg_.dist.param, level);
}

Estimate estimate_bernoulli(std::uint32_t ones, std::uint32_t m, double p,
                            double level) {
  check_level(level);
  if (m < 1) fail(ErrorKind::Domain, "m must be >= 1");
  if (ones > m) fail(ErrorKind::Domain, "ones must not exceed m");
  if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::Domain, "p must lie in (0,1)");

  const double log_q = std::log1p(-p);
  const auto c_of = [log_q](double prob) { return std::log1p(-prob) / log_q; };
  const double x = ones;
  const double n = m;
  const double tail = 0.5 - 0.5 * level;

  if (ones == m) {
    // One-sided bound: P^m >= 1 - level.
    const double p_lo = std::pow(1.0 - level, 1.0 / n);
    throw SaturationError("all Bernoulli bits are set; only a lower bound exists",
                          c_of(p_lo));
  }

  Estimate e;
  e.level = level;
  e.estimator = EstimatorId::Bernoulli;
  e.m = m;
  const double p_lo = ones == 0 ? 0.0 : stats::beta_quantile(x, n - x + 1.0, tail);
  const double p_hi = stats::beta_quantile(x + 1.0, n - x, 1.0 - tail);
  e.ci_lower = c_of(p_lo);
  e.ci_upper = c_of(p_hi);
  if (ones == 0) {
    e.c_hat = 0.0;
    e.std_error = 0.0;
    e.ci_lower = 0.0;
    return e;
  }
  e.c_hat = c_of(x / n);
  // I(c) = m q^c (log q)^2 / (1 - q^c)
  const double qc = std::exp(e.c_hat * log_q);
  const double info = n * qc * log_q * log_q / -std::expm1(e.c_hat * log_q);
  e.std_error = 1.0 / std::sqrt(info);
  e.ci_lower = std::min(e.ci_lower, e.c_hat);
  e.ci_upper = std::max(e.ci_upper, e.c_hat);
  return e;
}

// ---------------------------------------------------------------------------
// KthOrderSketch

KthOrderSketch::KthOrderSketch(HashConfig cfg, std::uint32_t k)
    : cfg_(cfg), k_(k) {
  cfg_.validate();
  if (cfg_.dist.kind != Marginal::Uniform01) {
    fail(ErrorKind::Domain, "k-th order sketch needs uniform hashing");
  }
  if (k_ < 1) fail(ErrorKind::Domain, "k must be >= 1");
  values_.assign(static_cast<std::size_t>(cfg_.m) * k_, 0.0);
  count_.assign(cfg_.m, 0);
}

KthOrderSketch KthOrderSketch::from_state(
    HashConfig cfg, std::uint32_t k,
    const std::vector<std::vector<double>>& lists) {
  KthOrderSketch s(cfg, k);
  if (lists.size() != cfg.m) fail(ErrorKind::Format, "list count does not match m");
  for (std::uint32_t j = 0; j < cfg.m; ++j) {
    const auto& list = lists[j];
    if (list.size() > k) fail(ErrorKind::Format, "top-k list longer than k");
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (!(list[i] > 0.0 && list[i] < 1.0) || (i > 0 && !(list[i] < list[i - 1]))) {
        fail(ErrorKind::Format, "top-k list must be strictly descending in (0,1)");
      }
      s.values_[static_cast<std::size_t>(j) * k + i] = list[i];
    }
    s.count_[j] = static_cast<std::uint32_t>(list.size());
  }
  return s;
}

std::span<const double> KthOrderSketch::top(std::uint32_t j) const {
  if (j >= cfg_.m) fail(ErrorKind::IndexOutOfRange, "stream index out of range");
  return {values_.data() + static_cast<std::size_t>(j) * k_, count_[j]};
}

void KthOrderSketch::offer(std::uint32_t j, double u) {
  double* row = values_.data() + static_cast<std::size_t>(j) * k_;
  std::uint32_t& cnt = count_[j];
  if (cnt == k_ && u <= row[k_ - 1]) return;
  std::uint32_t pos = 0;
  while (pos < cnt && row[pos] > u) ++pos;
  if (pos < cnt && row[pos] == u) return;  // set semantics on exact ties
  const std::uint32_t last = cnt < k_ ? cnt : k_ - 1;
  for (std::uint32_t i = last; i > pos; --i) row[i] = row[i - 1];
  row[pos] = u;
  if (cnt < k_) ++cnt;
}

void KthOrderSketch::update(std::string_view item, std::int64_t d) {
  require_insertion(d);
  const auto digest = hashing::item_digest(item, cfg_.salt);
  for (std::uint32_t j = 0; j < cfg_.m; ++j) {
    offer(j, hashing::uniform_from_bits(
                 hashing::stream_bits(digest, hashing::primary_counter(j))));
  }
}

void KthOrderSketch::update(const VariateRow& row, std::int64_t d) {
  require_insertion(d);
  require_row(row, cfg_);
  for (std::uint32_t j = 0; j < cfg_.m; ++j) offer(j, row.uniform(j));
}

void KthOrderSketch::merge(const KthOrderSketch& other) {
  require_same_config(cfg_, other.cfg_);
  if (k_ != other.k_) fail(ErrorKind::IncompatibleSketch, "k differs");
  for (std::uint32_t j = 0; j < cfg_.m; ++j) {
    for (double u : other.top(j)) offer(j, u);
  }
}

std::vector<double> KthOrderSketch::kth_log_values() const {
  std::vector<double> out(cfg_.m);
  for (std::uint32_t j = 0; j < cfg_.m; ++j) {
    if (count_[j] < k_) {
      fail(ErrorKind::InsufficientData,
           "stream " + std::to_string(j) + " holds fewer than k values (c < k)");
    }
    out[j] = std::log(values_[static_cast<std::size_t>(j) * k_ + k_ - 1]);
  }
  return out;
}

Estimate KthOrderSketch::estimate(double level) const {
  return estimate_kth(kth_log_values(), k_, level);
}

double kth_approximation(double neg_log_sum, std::uint32_t m, std::uint32_t k) {
  if (!(neg_log_sum > 0.0) || m < 1 || k < 1) {
    fail(ErrorKind::Domain, "kth_approximation needs S > 0, m >= 1, k >= 1");
  }
  return k / -std::expm1(-neg_log_sum / m);
}

double kth_root(double neg_log_sum, std::uint32_t m, std::uint32_t k) {
  if (!(neg_log_sum > 0.0) || m < 1 || k < 1) {
    fail(ErrorKind::DegenerateSketch, "kth_root needs S > 0, m >= 1, k >= 1");
  }
  const double mm = m;
  if (k == 1) return mm / neg_log_sum;

  // g(c) = sum_{i=1..k} m / (c - i + 1) - S is strictly decreasing on
  // (k-1, inf) from +inf to -S, so the root is bracketed by
  // (k-1, k-1 + k m / S].
  const auto g = [&](double c) {
    double s = 0.0;
    for (std::uint32_t i = 1; i <= k; ++i) s += mm / (c - i + 1.0);
    return s - neg_log_sum;
  };
  const auto dg = [&](double c) {
    double s = 0.0;
    for (std::uint32_t i = 1; i <= k; ++i) {
      const double t = c - i + 1.0;
      s -= mm / (t * t);
    }
    return s;
  };
  double lo = k - 1.0;
  double hi = k - 1.0 + k * mm / neg_log_sum;
  double c = std::clamp(kth_approximation(neg_log_sum, m, k), lo, hi);
  if (c <= lo) c = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double gv = g(c);
    if (gv > 0.0) lo = c; else hi = c;
    double next = c - gv / dg(c);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - c) <= 1e-14 * c) return next;
    c = next;
  }
  throw ConvergenceError("k-th order root did not converge",
                         kth_approximation(neg_log_sum, m, k));
}

Estimate estimate_kth(std::span<const double> kth_log_values, std::uint32_t k,
                      double level) {
  const auto m = static_cast<std::uint32_t>(kth_log_values.size());
  if (m < 1) fail(ErrorKind::EmptySketch, "no streams");
  double s = 0.0;
  for (double v : kth_log_values) s -= v;
  const double c_hat = kth_root(s, m, k);
  return lognormal_interval(c_hat, static_cast<double>(k) * m, level,
                            EstimatorId::KthOrder, m);
}

double combine_kth(double c1, std::uint32_t m1, double c2, std::uint32_t m2,
                   std::uint32_t k) {
  if (k < 1 || m1 + m2 < 1) fail(ErrorKind::Domain, "need k >= 1 and m1 + m2 >= 1");
  if ((m1 > 0 && !(c1 > k)) || (m2 > 0 && !(c2 > k))) {
    fail(ErrorKind::Domain, "component estimates must exceed k");
  }
  double t = 0.0;
  if (m1 > 0) t += m1 * std::log1p(-static_cast<double>(k) / c1);
  if (m2 > 0) t += m2 * std::log1p(-static_cast<double>(k) / c2);
  t /= static_cast<double>(m1 + m2);
  return k / -std::expm1(t);
}

}  // namespace cardsketch
