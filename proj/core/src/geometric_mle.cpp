#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cardsketch/error.hpp"
#include "cardsketch/inference.hpp"
#include "cardsketch/order_sketch.hpp"
#include "scan.hpp"

namespace cardsketch {

namespace {

// Safety margin for the 1 - q^Y comparison cache. A uniform below the cached
// threshold by more than this cannot produce a larger geometric value, even
// allowing for rounding in log1p / log / ceil.
constexpr double kThresholdMargin = 1e-9;

std::uint32_t geometric_from_uniform(double u, double log_q) noexcept {
  const double x = std::ceil(std::log1p(-u) / log_q);
  if (x < 1.0) return 1;
  if (x >= static_cast<double>(std::numeric_limits<std::uint32_t>::max())) {
    return std::numeric_limits<std::uint32_t>::max();
  }
  return static_cast<std::uint32_t>(x);
}

struct Level {
  std::uint32_t y;
  double count;
  double la;  // log(1 - q^y)
  double d;   // log(1 - q^y) - log(1 - q^(y-1)); unused for y = 1
};

std::vector<Level> tabulate(std::span<const std::uint32_t> maxima, double q) {
  std::map<std::uint32_t, double> counts;
  for (auto y : maxima) {
    if (y == 0) fail(ErrorKind::EmptySketch, "sketch has an empty stream");
    counts[y] += 1.0;
  }
  const double log_q = std::log(q);
  std::vector<Level> levels;
  levels.reserve(counts.size());
  for (const auto& [y, n] : counts) {
    Level l{y, n, std::log1p(-std::exp(y * log_q)), 0.0};
    if (y > 1) l.d = l.la - std::log1p(-std::exp((y - 1.0) * log_q));
    levels.push_back(l);
  }
  return levels;
}

// Score: sum_y n_y [la + D / (e^{cD} - 1)], with the y = 1 term equal to la.
double score(const std::vector<Level>& levels, double c) {
  double s = 0.0;
  for (const auto& l : levels) {
    double t = l.la;
    if (l.y > 1) t += l.d / std::expm1(c * l.d);
    s += l.count * t;
  }
  return s;
}

double score_slope(const std::vector<Level>& levels, double c) {
  double s = 0.0;
  for (const auto& l : levels) {
    if (l.y == 1) continue;
    const double a = std::expm1(c * l.d);
    const double b = -std::expm1(-c * l.d);
    const double denom = a * b;
    if (std::isfinite(denom) && denom > 0.0) s -= l.count * l.d * l.d / denom;
  }
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// GeometricMaxSketch

GeometricMaxSketch::GeometricMaxSketch(HashConfig cfg) : cfg_(cfg), log_q_(0.0) {
  cfg_.validate();
  if (cfg_.dist.kind != Marginal::Geometric) {
    fail(ErrorKind::Domain, "geometric sketch needs geometric hashing");
  }
  log_q_ = std::log(cfg_.dist.param);
  max_.assign(cfg_.m, 0);
  skip_key_.assign(cfg_.m, -1);
}

GeometricMaxSketch GeometricMaxSketch::from_state(HashConfig cfg,
                                                  std::vector<std::uint32_t> maxima) {
  GeometricMaxSketch s(cfg);
  if (maxima.size() != cfg.m) fail(ErrorKind::Format, "slot count does not match m");
  s.max_ = std::move(maxima);
  for (std::uint32_t j = 0; j < cfg.m; ++j) s.refresh_threshold(j);
  return s;
}

void GeometricMaxSketch::refresh_threshold(std::uint32_t j) {
  // u = (key + 1/2) 2^-52 exceeds 1 - q^Y only if key > (1 - q^Y) 2^52 - 1/2.
  if (max_[j] == 0) {
    skip_key_[j] = -1;
    return;
  }
  const double threshold = -std::expm1(max_[j] * log_q_) - kThresholdMargin;
  skip_key_[j] = threshold <= 0.0
                     ? -1
                     : static_cast<std::int64_t>(std::floor(threshold * 0x1p52 - 0.5));
}

void GeometricMaxSketch::offer(std::uint32_t j, std::uint64_t bits) {
  const std::uint32_t y =
      geometric_from_uniform(hashing::uniform_from_bits(bits), log_q_);
  if (y > max_[j]) {
    max_[j] = y;
    refresh_threshold(j);
  }
}

void GeometricMaxSketch::update(std::string_view item, std::int64_t d) {
  if (d <= 0) {
    fail(ErrorKind::UnsupportedDeletion,
         "maximal-term sketches accept only positive quantities (d=" +
             std::to_string(d) + ")");
  }
  update(VariateRow(item, cfg_.salt, cfg_.m), d);
}

void GeometricMaxSketch::update(const VariateRow& row, std::int64_t d) {
  if (d <= 0) {
    fail(ErrorKind::UnsupportedDeletion,
         "maximal-term sketches accept only positive quantities (d=" +
             std::to_string(d) + ")");
  }
  if (row.salt() != cfg_.salt || row.size() < cfg_.m) {
    fail(ErrorKind::IncompatibleSketch,
         "variate row was hashed with a different salt or fewer streams");
  }
  const auto bits = row.bits();
  detail::scan_exceeding(bits, skip_key_.data(), cfg_.m,
                         [&](std::uint32_t j) { offer(j, bits[j]); });
}

void GeometricMaxSketch::merge(const GeometricMaxSketch& other) {
  if (!(cfg_ == other.cfg_)) {
    fail(ErrorKind::IncompatibleSketch,
         "cannot merge sketches with different m, distribution or salt");
  }
  for (std::uint32_t j = 0; j < cfg_.m; ++j) {
    if (other.max_[j] > max_[j]) {
      max_[j] = other.max_[j];
      refresh_threshold(j);
    }
  }
}

Estimate GeometricMaxSketch::estimate(double level) const {
  return estimate_geometric(max_, cfg_.dist.param, level);
}

double GeometricMaxSketch::estimate_recursive() const {
  return estimate_geometric_recursive(max_, cfg_.dist.param);
}

// ---------------------------------------------------------------------------
// Estimators

double estimate_geometric_recursive(std::span<const std::uint32_t> maxima,
                                    double q) {
  if (!(q > 0.0 && q < 1.0)) fail(ErrorKind::Domain, "q must lie in (0,1)");
  if (maxima.empty()) fail(ErrorKind::EmptySketch, "no streams");
  const double log_q = std::log(q);
  double log_s = 0.0;
  for (auto y : maxima) {
    if (y == 0) fail(ErrorKind::EmptySketch, "sketch has an empty stream");
    log_s += std::log1p(-std::exp(y * log_q));
  }
  return -static_cast<double>(maxima.size()) / log_s;
}

GeometricStart geometric_start(std::span<const std::uint32_t> maxima, double q) {
  if (!(q > 0.0 && q < 1.0)) fail(ErrorKind::Domain, "q must lie in (0,1)");
  if (maxima.empty()) fail(ErrorKind::EmptySketch, "no streams");
  GeometricStart s;
  const double log_q = std::log(q);
  s.n = static_cast<std::uint32_t>(std::max(1.0, std::floor(std::log(0.5) / log_q)));
  for (auto y : maxima) {
    if (y == 0) fail(ErrorKind::EmptySketch, "sketch has an empty stream");
    if (y <= s.n) ++s.r;
  }
  const auto m = static_cast<std::uint32_t>(maxima.size());
  if (s.r == 0 || s.r == m) {
    s.fallback = true;
    s.value = estimate_geometric_recursive(maxima, q);
    return s;
  }
  s.value = std::log(static_cast<double>(s.r) / m) /
            std::log1p(-std::exp(s.n * log_q));
  return s;
}

double geometric_score(std::span<const std::uint32_t> maxima, double q, double c) {
  if (!(q > 0.0 && q < 1.0)) fail(ErrorKind::Domain, "q must lie in (0,1)");
  if (!(c > 0.0)) fail(ErrorKind::Domain, "c must be positive");
  return score(tabulate(maxima, q), c);
}

Estimate estimate_geometric(std::span<const std::uint32_t> maxima, double q,
                            double level) {
  check_level(level);
  if (!(q > 0.0 && q < 1.0)) fail(ErrorKind::Domain, "q must lie in (0,1)");
  if (maxima.empty()) fail(ErrorKind::EmptySketch, "no streams");
  const auto levels = tabulate(maxima, q);
  const GeometricStart start = geometric_start(maxima, q);
  if (levels.size() == 1 && levels.front().y == 1) {
    // Every maximum is 1: the likelihood increases as c -> 0.
    throw ConvergenceError("score has no root: every stream maximum is 1",
                           start.value);
  }

  // The score is decreasing in c, +inf at 0+ and negative for large c.
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  double c = start.value;
  if (!(c > 0.0) || !std::isfinite(c)) c = 1.0;
  constexpr int kMaxIter = 50;
  for (int it = 0; it < kMaxIter; ++it) {
    const double s = score(levels, c);
    if (s > 0.0) lo = c; else hi = c;
    double next = c - s / score_slope(levels, c);
    if (!(next > lo && next < hi) || !std::isfinite(next)) {
      next = std::isfinite(hi) ? (lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi)
                               : 2.0 * c;
    }
    if (std::fabs(next - c) < 1e-9 * c) {
      const auto m = static_cast<std::uint32_t>(maxima.size());
      return lognormal_interval(next, m * psi_infinity(q), level,
                                EstimatorId::GeometricMle, m);
    }
    c = next;
  }
  throw ConvergenceError("geometric Newton iteration hit the iteration cap",
                         start.value);
}

}  // namespace cardsketch
