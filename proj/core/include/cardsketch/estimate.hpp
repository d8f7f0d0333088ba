#pragma once

#include <cstdint>
#include <string_view>

namespace cardsketch {

enum class EstimatorId : std::uint8_t {
  MaxContinuous,      // -m / sum log F(M_j), exact Gamma pivot interval
  KthOrder,           // root of the k-th order statistic score equation
  Bernoulli,          // bit-array MLE
  GeometricMle,       // Newton solution of the geometric score equation
  GeometricRecursive, // exponential-approximation sufficient statistic
  Projection,         // m / sum V_j^-alpha
  ProjectionMedian,   // (median V / median F_alpha)^alpha
  LogLog,
  HyperLogLog,
  MinCount,
};

const char* to_string(EstimatorId id) noexcept;

struct Estimate {
  double c_hat = 0.0;
  double std_error = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  double level = 0.95;
  EstimatorId estimator = EstimatorId::MaxContinuous;
  std::uint32_t m = 0;
};

/// Interval c_hat * exp(+-z / sqrt(information)) for an estimator whose
/// relative standard error is 1/sqrt(information). Positive and contains
/// c_hat for every level.
Estimate lognormal_interval(double c_hat, double information, double level,
                            EstimatorId id, std::uint32_t m);

/// Throws Domain unless 0 < level < 1.
void check_level(double level);

}  // namespace cardsketch
