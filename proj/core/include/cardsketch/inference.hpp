#pragma once

#include <cstdint>

namespace cardsketch {

/// Large-c ARE of the Bernoulli sketch at lambda = c p: lambda^2 / (e^lambda - 1).
double are_bernoulli(double lambda);

/// Positive root of lambda = 2 (1 - e^-lambda).
double optimal_lambda();

/// Limit of c^2 I(c) for geometric hashing with parameter q.
double psi_infinity(double q);

/// Fisher information about c carried by one maximum of c geometric variates.
double fisher_info_geometric(double c, double q);

struct TailBound {
  double epsilon = 0.0;
  std::uint32_t m = 0;
  double upper = 1.0;  // bound on P(c_hat >= (1 + eps) c)
  double lower = 1.0;  // bound on P(c_hat <= (1 - eps) c)
  double c1 = 2.0;
  double c2 = 2.0;
};

TailBound chernoff_bounds(double epsilon, std::uint32_t m);

struct Sizing {
  std::uint32_t m = 1;
  double register_bits = 0.0;  // bits for one geometric maximum at cardinality c
  double storage_bits = 0.0;   // m * register_bits
};

/// Smallest m with max(upper, lower) <= delta. Storage is sized for geometric
/// registers with parameter q at cardinality c.
Sizing required_m(double epsilon, double delta, double c = 1e6, double q = 0.5);

}  // namespace cardsketch
