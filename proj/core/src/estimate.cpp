#include "cardsketch/estimate.hpp"

#include <cmath>

#include "cardsketch/error.hpp"
#include "cardsketch/stats.hpp"

namespace cardsketch {

const char* to_string(EstimatorId id) noexcept {
  switch (id) {
    case EstimatorId::MaxContinuous: return "max-continuous";
    case EstimatorId::KthOrder: return "kth-order";
    case EstimatorId::Bernoulli: return "bernoulli";
    case EstimatorId::GeometricMle: return "geometric-mle";
    case EstimatorId::GeometricRecursive: return "geometric-recursive";
    case EstimatorId::Projection: return "projection";
    case EstimatorId::ProjectionMedian: return "projection-median";
    case EstimatorId::LogLog: return "loglog";
    case EstimatorId::HyperLogLog: return "hyperloglog";
    case EstimatorId::MinCount: return "mincount";
  }
  return "unknown";
}

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    fail(ErrorKind::Domain, "confidence level must lie in (0,1)");
  }
}

Estimate lognormal_interval(double c_hat, double information, double level,
                            EstimatorId id, std::uint32_t m) {
  check_level(level);
  const double rel_se = 1.0 / std::sqrt(information);
  const double z = stats::normal_quantile(0.5 + 0.5 * level);
  Estimate e;
  e.c_hat = c_hat;
  e.std_error = c_hat * rel_se;
  e.ci_lower = c_hat * std::exp(-z * rel_se);
  e.ci_upper = c_hat * std::exp(z * rel_se);
  e.level = level;
  e.estimator = id;
  e.m = m;
  return e;
}

}  // namespace cardsketch
