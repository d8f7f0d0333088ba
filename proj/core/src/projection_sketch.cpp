#include "cardsketch/projection_sketch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <string>

#include "cardsketch/error.hpp"
#include "cardsketch/order_sketch.hpp"
#include "cardsketch/stats.hpp"

namespace cardsketch {

namespace {

double radical_inverse(std::uint64_t i, std::uint32_t base) {
  const double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

}  // namespace

ProjectionSketch::ProjectionSketch(HashConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  if (cfg_.dist.kind != Marginal::PositiveStable) {
    fail(ErrorKind::Domain, "projection sketch needs positive stable hashing");
  }
  acc_.assign(cfg_.m, ExactSum{});
}

ProjectionSketch ProjectionSketch::from_state(HashConfig cfg,
                                              std::vector<ExactSum> acc) {
  ProjectionSketch s(cfg);
  if (acc.size() != cfg.m) fail(ErrorKind::Format, "accumulator count does not match m");
  s.acc_ = std::move(acc);
  return s;
}

std::vector<SignedLog> ProjectionSketch::accumulators() const {
  std::vector<SignedLog> out;
  out.reserve(acc_.size());
  for (const auto& a : acc_) out.push_back(a.to_signed_log());
  return out;
}

std::size_t ProjectionSketch::state_bytes() const {
  std::size_t bytes = 0;
  for (const auto& a : acc_) bytes += 4 + 4 * a.digits().size();
  return bytes;
}

void ProjectionSketch::update(std::string_view item, std::int64_t d) {
  update(VariateRow(item, cfg_.salt, cfg_.m), d);
}

void ProjectionSketch::update(const VariateRow& row, std::int64_t d) {
  if (row.salt() != cfg_.salt || row.size() < cfg_.m) {
    fail(ErrorKind::IncompatibleSketch,
         "variate row was hashed with a different salt or fewer streams");
  }
  if (d == 0) return;
  const double alpha = cfg_.dist.param;
  const auto digest = row.digest();
  for (std::uint32_t j = 0; j < cfg_.m; ++j) {
    const double u2 = hashing::uniform_from_bits(
        hashing::stream_bits(digest, hashing::auxiliary_counter(j)));
    const double w = -std::log1p(-u2);
    const double log_x = detail::stable_log_kernel(row.uniform(j), w, alpha);
    acc_[j].add(d, log_x);
  }
}

void ProjectionSketch::merge(const ProjectionSketch& other) {
  if (!(cfg_ == other.cfg_)) {
    fail(ErrorKind::IncompatibleSketch,
         "cannot merge sketches with different m, alpha or salt");
  }
  for (std::uint32_t j = 0; j < cfg_.m; ++j) acc_[j].add(other.acc_[j]);
}

std::vector<double> ProjectionSketch::log_values() const {
  std::vector<double> out(cfg_.m);
  for (std::uint32_t j = 0; j < cfg_.m; ++j) {
    const SignedLog v = acc_[j].to_signed_log();
    if (v.sign() <= 0) {
      fail(ErrorKind::InvalidState,
           "projection " + std::to_string(j) +
               " is not positive; estimation needs non-negative item totals");
    }
    out[j] = v.log_magnitude();
  }
  return out;
}

Estimate ProjectionSketch::estimate(double level) const {
  return estimate_projection(log_values(), alpha(), level);
}

double ProjectionSketch::median_estimate() const {
  return estimate_projection_median(log_values(), alpha());
}

Estimate estimate_projection(std::span<const double> log_values, double alpha,
                             double level) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::Domain, "alpha must lie in (0,1)");
  if (log_values.empty()) fail(ErrorKind::EmptySketch, "no streams");
  double s = 0.0;
  for (double lv : log_values) s += std::exp(-alpha * lv);
  Estimate e = estimate_continuous(s, static_cast<std::uint32_t>(log_values.size()),
                                   level);
  e.estimator = EstimatorId::Projection;
  return e;
}

double estimate_projection_median(std::span<const double> log_values,
                                  double alpha) {
  if (log_values.empty()) fail(ErrorKind::EmptySketch, "no streams");
  const double log_mu = stable_median(alpha);
  const double med = stats::median({log_values.begin(), log_values.end()});
  return std::exp(alpha * (med - log_mu));
}

double stable_median(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::Domain, "alpha must lie in (0,1)");
  static std::mutex mutex;
  static std::map<double, double> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(alpha); it != cache.end()) return it->second;

  constexpr std::uint64_t kPoints = 10'000'000;
  std::vector<double> logs(kPoints);
  for (std::uint64_t i = 0; i < kPoints; ++i) {
    const double u = radical_inverse(i + 1, 2);
    const double u2 = radical_inverse(i + 1, 3);
    logs[i] = detail::stable_log_kernel(u, -std::log1p(-u2), alpha);
  }
  const auto mid = logs.begin() + kPoints / 2;
  std::nth_element(logs.begin(), mid, logs.end());
  const double upper = *mid;
  const double lower = *std::max_element(logs.begin(), mid);
  const double result = 0.5 * (lower + upper);
  cache.emplace(alpha, result);
  return result;
}

}  // namespace cardsketch
