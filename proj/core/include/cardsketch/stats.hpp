#pragma once

#include <functional>
#include <span>
#include <vector>

namespace cardsketch::stats {

/// p-quantile of Gamma(shape, 1).
double gamma_quantile(double shape, double p);

/// P(G <= x) for G ~ Gamma(shape, 1).
double gamma_cdf(double shape, double x);

/// p-quantile of the standard normal.
double normal_quantile(double p);

/// Inverse of the regularized incomplete beta function in x.
double beta_quantile(double a, double b, double p);

struct KsResult {
  double statistic = 0.0;  // sup |F_n - F|
  double p_value = 1.0;    // asymptotic Kolmogorov tail, small-sample corrected
  std::size_t n = 0;
};

/// One-sample Kolmogorov-Smirnov test of `sample` against `cdf`.
KsResult ks_test(std::vector<double> sample,
                 const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov test.
KsResult ks_test_two_sample(std::vector<double> a, std::vector<double> b);

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_tail(double lambda);

double mean(std::span<const double> xs);
/// Unbiased sample variance.
double variance(std::span<const double> xs);
double median(std::vector<double> xs);

}  // namespace cardsketch::stats
