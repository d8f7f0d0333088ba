#include "cardsketch/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "cardsketch/error.hpp"
#include "cardsketch/log_space.hpp"
#include "cardsketch/seeded_hash.hpp"
#include "cardsketch/stats.hpp"

namespace cardsketch {

CoupledResult coupled_residuals(std::span<const StreamElement> stream, std::uint32_t m,
                                double alpha, std::uint64_t salt) {
  HashConfig cfg{m, salt, Distribution::positive_stable(alpha)};
  cfg.validate();
  constexpr double kTol = 1e-12;
  const double neg_inf = -std::numeric_limits<double>::infinity();

  std::vector<SignedLog> v(m);
  std::vector<double> max_log_x(m, neg_inf);
  std::unordered_map<std::string_view, double> totals;
  double total = 0.0;
  double min_total = std::numeric_limits<double>::infinity();

  CoupledResult out;
  VariateRow row;
  for (const auto& e : stream) {
    if (e.d <= 0) {
      fail(ErrorKind::UnsupportedDeletion, "coupled run needs positive quantities");
    }
    const double d = static_cast<double>(e.d);
    double& a = totals[e.item];
    a += d;
    total += d;
    // Smallest a_i only moves up when an item grows, so rescan lazily.
    if (a - d == 0.0) {
      min_total = std::min(min_total, a);
    } else if (a - d == min_total) {
      min_total = std::numeric_limits<double>::infinity();
      for (const auto& [item, t] : totals) min_total = std::min(min_total, t);
    }

    row.assign(e.item, salt, m);
    const double log_d = std::log(d);
    const double lower = alpha * std::log(min_total);
    const double upper = alpha * std::log(total);
    for (std::uint32_t j = 0; j < m; ++j) {
      const double u2 = hashing::uniform_from_bits(
          hashing::stream_bits(row.digest(), hashing::auxiliary_counter(j)));
      const double log_x = detail::stable_log_kernel(row.uniform(j), -std::log1p(-u2), alpha);
      v[j] += SignedLog::from_log(1, log_d + log_x);
      max_log_x[j] = std::max(max_log_x[j], log_x);
      // log(V^alpha / M) = alpha (log V - max log X)
      const double log_ratio = alpha * (v[j].log_magnitude() - max_log_x[j]);
      ++out.sandwich_checks;
      if (log_ratio < lower - kTol || log_ratio > upper + kTol) ++out.sandwich_violations;
    }
  }
  if (stream.empty()) fail(ErrorKind::EmptySketch, "empty stream");

  out.residuals.resize(m);
  out.ratios.resize(m);
  std::vector<double> abs_res(m);
  for (std::uint32_t j = 0; j < m; ++j) {
    const double log_v = v[j].log_magnitude();
    out.residuals[j] = std::exp(-alpha * log_v) - std::exp(-alpha * max_log_x[j]);
    out.ratios[j] = std::exp(alpha * (log_v - max_log_x[j]));
    abs_res[j] = std::fabs(out.residuals[j]);
  }
  out.max_abs_residual = *std::max_element(abs_res.begin(), abs_res.end());
  out.median_abs_residual = stats::median(abs_res);
  return out;
}

}  // namespace cardsketch
