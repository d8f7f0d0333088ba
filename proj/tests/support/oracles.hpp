#pragma once

// Independent reference implementations used only by the tests. They favour
// directness over speed and share no code with the library beyond hashing.

#include <cstdint>
#include <string>
#include <vector>

namespace oracle {

/// Regularized lower incomplete gamma P(a, x) by series / continued fraction.
double gamma_cdf(double a, double x);

double normal_cdf(double x);

/// Direct long-double sum of the psi-infinity series over k in [kmin, kmax].
double psi_infinity_direct(double q, int kmin, int kmax);

/// Fisher information from the textbook formula, summed over y = 1..terms.
double fisher_info_direct(double c, double q, int terms);

/// log-likelihood of geometric maxima under cardinality c.
double geometric_loglik(const std::vector<std::uint32_t>& maxima, double q, double c);

/// Bisection root of sum_{i=1..k} m/(c-i+1) = S on (k-1, inf).
double kth_root_bisect(double neg_log_sum, std::uint32_t m, std::uint32_t k);

/// n draws of 1 / (2 N^2), N standard normal: the stable law with alpha = 1/2.
std::vector<double> half_stable_sample(std::size_t n, std::uint64_t seed);

/// Asymptotic 1% critical value of the one-sample KS statistic.
double ks_critical_1pct(std::size_t n);

/// Plain-loop maximal-term state built from uniform_stream(), one call per
/// (item, stream); the library's row/scan path must match it bit for bit.
std::vector<double> naive_log_max(const std::vector<std::string>& items, std::uint32_t m,
                                  std::uint64_t salt, bool exponential);

/// Item ids "item-<i>" for i in [begin, end).
std::vector<std::string> item_range(std::size_t begin, std::size_t end);

}  // namespace oracle
