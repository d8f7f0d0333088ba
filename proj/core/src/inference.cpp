#include "cardsketch/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cardsketch/error.hpp"

namespace cardsketch {

namespace {

constexpr double kRelTol = 1e-15;

void check_open_unit(double x, const char* name) {
  if (!(x > 0.0 && x < 1.0)) {
    fail(ErrorKind::Domain, std::string(name) + " must lie strictly inside (0,1)");
  }
}

// Series for (1 + s e) log(1 + s e) - s e  with s = +-1:
// sum_{n>=2} (-s)^n e^n / (n (n - 1)) for s=+1, e^n / (n (n - 1)) for s=-1.
double chernoff_denominator(double eps, bool upper) {
  if (eps >= 0.5) {
    return upper ? -eps + (1.0 + eps) * std::log1p(eps)
                 : eps + (1.0 - eps) * std::log1p(-eps);
  }
  double sum = 0.0;
  double power = eps;
  for (int n = 2; n < 200; ++n) {
    power *= eps;
    double term = power / (static_cast<double>(n) * (n - 1));
    if (upper && (n % 2 == 1)) term = -term;
    sum += term;
    if (std::fabs(term) < 1e-18 * sum) break;
  }
  return sum;
}

}  // namespace

double are_bernoulli(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    fail(ErrorKind::Domain, "lambda must be positive and finite");
  }
  return lambda * lambda / std::expm1(lambda);
}

double optimal_lambda() {
  // f(l) = l - 2 (1 - e^-l): f(1) < 0 < f(2), f' > 0 on the bracket.
  const auto f = [](double l) { return l + 2.0 * std::expm1(-l); };
  const auto df = [](double l) { return 1.0 - 2.0 * std::exp(-l); };
  double lo = 1.0;
  double hi = 2.0;
  double x = 1.6;
  for (int it = 0; it < 100; ++it) {
    const double fx = f(x);
    if (std::fabs(fx) <= 1e-15) return x;
    if (fx < 0.0) lo = x; else hi = x;
    double next = x - fx / df(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) return x;
    x = next;
  }
  return x;
}

double psi_infinity(double q) {
  check_open_unit(q, "q");
  const double log_q = std::log(q);
  const double log_ratio = 2.0 * std::log1p(-q) - 2.0 * log_q;  // log (1/q - 1)^2
  // log of the k-th term: 2k log q + log((1/q-1)^2) - a - log(1 - e^(b-a))
  // with a = q^(k-1), b = q^k.
  const auto log_term = [&](long k) {
    const double a = std::exp((k - 1) * log_q);
    const double b = std::exp(k * log_q);
    return 2.0 * k * log_q + log_ratio - a - std::log(-std::expm1(b - a));
  };
  double sum = 0.0;
  // Upward: for large k the terms decay like q^k; stop once the geometric
  // tail bound term / (1 - q) is negligible.
  for (long k = 0;; ++k) {
    const double t = std::exp(log_term(k));
    sum += t;
    if (std::exp((k - 1) * log_q) < 1.0 && t / (1.0 - q) < kRelTol * sum) break;
  }
  // Downward: terms rise to a peak near q^k ~ 1 and then decay
  // double-exponentially.
  for (long k = -1;; --k) {
    const double t = std::exp(log_term(k));
    sum += t;
    if (std::exp((k - 1) * log_q) > 2.0 && t < kRelTol * sum) break;
  }
  return sum;
}

double fisher_info_geometric(double c, double q) {
  if (!(c >= 1.0) || !std::isfinite(c)) fail(ErrorKind::Domain, "c must be >= 1");
  check_open_unit(q, "q");
  const double log_q = std::log(q);
  // P(Y <= y) = A_y^c with A_y = 1 - q^y. Term for y:
  //   [A_y^c log A_y - A_{y-1}^c log A_{y-1}]^2 / (A_y^c - A_{y-1}^c)
  // = A_y^c (D + lb (1 - r))^2 / (1 - r),  D = la - lb, r = e^{-c D}.
  double sum = 0.0;
  double lb = -std::numeric_limits<double>::infinity();
  for (std::uint64_t y = 1;; ++y) {
    const double la = std::log1p(-std::exp(static_cast<double>(y) * log_q));
    double term;
    if (y == 1) {
      term = std::exp(c * la) * la * la;
    } else {
      const double d = la - lb;
      const double one_minus_r = -std::expm1(-c * d);
      const double num = d + lb * one_minus_r;
      term = std::exp(c * la) * num * num / one_minus_r;
    }
    sum += term;
    const bool past_peak = c * std::exp(static_cast<double>(y) * log_q) < 1.0;
    if (past_peak && term / (1.0 - q) < kRelTol * sum) break;
    if (term == 0.0 && past_peak) break;
    lb = la;
  }
  return sum;
}

TailBound chernoff_bounds(double epsilon, std::uint32_t m) {
  check_open_unit(epsilon, "epsilon");
  if (m < 1) fail(ErrorKind::Domain, "m must be >= 1");
  TailBound b;
  b.epsilon = epsilon;
  b.m = m;
  const double e2 = epsilon * epsilon;
  b.c1 = e2 * (1.0 + epsilon) / chernoff_denominator(epsilon, true);
  b.c2 = e2 * (1.0 - epsilon) / chernoff_denominator(epsilon, false);
  b.upper = std::exp(-static_cast<double>(m) * e2 / b.c1);
  b.lower = std::exp(-static_cast<double>(m) * e2 / b.c2);
  return b;
}

Sizing required_m(double epsilon, double delta, double c, double q) {
  check_open_unit(epsilon, "epsilon");
  if (!(delta > 0.0 && delta <= 1.0)) fail(ErrorKind::Domain, "delta must lie in (0,1]");
  if (!(c >= 1.0)) fail(ErrorKind::Domain, "c must be >= 1");
  check_open_unit(q, "q");
  const TailBound unit = chernoff_bounds(epsilon, 1);
  const double worst = std::max(unit.c1, unit.c2);
  const double guess = std::ceil(worst * std::log(1.0 / delta) / (epsilon * epsilon));
  if (guess > static_cast<double>(std::numeric_limits<std::uint32_t>::max())) {
    fail(ErrorKind::Domain, "required m exceeds 2^32");
  }
  const auto ok = [&](std::uint32_t m) {
    const TailBound b = chernoff_bounds(epsilon, m);
    return std::max(b.upper, b.lower) <= delta;
  };
  auto m = static_cast<std::uint32_t>(std::max(1.0, guess));
  while (m > 1 && ok(m - 1)) --m;
  while (!ok(m)) ++m;

  Sizing s;
  s.m = m;
  // Expected maximum of c geometric variates is about (log c + gamma) / log(1/q) + 1/2.
  const double expected_max =
      (std::log(c) + std::numbers::egamma) / -std::log(q) + 0.5;
  s.register_bits = std::ceil(std::log2(expected_max + 1.0));
  s.storage_bits = m * s.register_bits;
  return s;
}

}  // namespace cardsketch
