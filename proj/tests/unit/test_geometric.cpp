#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cardsketch/error.hpp"
#include "cardsketch/inference.hpp"
#include "cardsketch/order_sketch.hpp"
#include "oracles.hpp"

using namespace cardsketch;

namespace {

HashConfig gcfg(std::uint32_t m, double q, std::uint64_t salt = 1) {
  return {m, salt, Distribution::geometric(q)};
}

GeometricMaxSketch build(std::uint32_t m, double q, std::size_t begin, std::size_t end,
                         std::uint64_t salt = 1) {
  GeometricMaxSketch s(gcfg(m, q, salt));
  for (const auto& it : oracle::item_range(begin, end)) s.update(it);
  return s;
}

}  // namespace

TEST(GeometricSketch, MatchesNaiveMaxima) {
  for (double q : {0.5, 10.0 / 11.0, 0.99}) {
    const auto cfg = gcfg(48, q, 8);
    const auto items = oracle::item_range(0, 2500);
    const auto s = build(48, q, 0, 2500, 8);
    for (std::uint32_t j = 0; j < 48; ++j) {
      std::uint32_t y = 0;
      for (const auto& it : items) y = std::max(y, geometric_variate(uniform_stream(it, j, cfg), q));
      ASSERT_EQ(s.maxima()[j], y) << q << " " << j;
    }
  }
}

TEST(GeometricSketch, InvariancesAndMerge) {
  auto a = build(32, 0.5, 0, 400);
  const auto b = build(32, 0.5, 300, 900);
  GeometricMaxSketch dup(gcfg(32, 0.5));
  for (const auto& it : oracle::item_range(0, 400)) { dup.update(it); dup.update(it, 3); }
  EXPECT_EQ(dup, a);
  a.merge(b);
  EXPECT_EQ(a, build(32, 0.5, 0, 900));
  EXPECT_THROW(a.merge(build(32, 0.25, 0, 1)), Error);
  EXPECT_THROW(a.update("x", 0), Error);
}

TEST(GeometricSketch, FromStateContinuesIdentically) {
  auto s = build(16, 10.0 / 11.0, 0, 300);
  auto r = GeometricMaxSketch::from_state(s.config(), {s.maxima().begin(), s.maxima().end()});
  for (const auto& it : oracle::item_range(300, 700)) { s.update(it); r.update(it); }
  EXPECT_EQ(s, r);
}

TEST(GeometricStart, Examples) {
  const std::vector<std::uint32_t> y{1, 2, 3, 4};
  const auto s = geometric_start(y, 0.5);
  EXPECT_EQ(s.n, 1u);
  EXPECT_EQ(s.r, 1u);
  EXPECT_FALSE(s.fallback);
  EXPECT_NEAR(s.value, 2.0, 1e-14);
  EXPECT_EQ(geometric_start(y, 10.0 / 11.0).n, 7u);
}

TEST(GeometricStart, FallsBackWhenNoneAtOrBelowN) {
  const std::vector<std::uint32_t> y{5, 6, 7};
  const auto s = geometric_start(y, 0.5);
  EXPECT_TRUE(s.fallback);
  EXPECT_EQ(s.value, estimate_geometric_recursive(y, 0.5));
}

TEST(GeometricRecursive, ClosedForm) {
  const double q = 1.0 - std::exp(-1.0);
  const std::vector<std::uint32_t> y{1};
  EXPECT_NEAR(estimate_geometric_recursive(y, q), 1.0, 1e-14);
  EXPECT_THROW(estimate_geometric_recursive(std::vector<std::uint32_t>{1, 0}, 0.5), Error);
}

TEST(GeometricRecursive, FunctionOfMergedState) {
  auto a = build(64, 0.9, 0, 500);
  const auto b = build(64, 0.9, 500, 1000);
  a.merge(b);
  EXPECT_EQ(a.estimate_recursive(), build(64, 0.9, 0, 1000).estimate_recursive());
}

TEST(GeometricMle, SolvesScoreAndMaximizesLikelihood) {
  for (double q : {0.5, 10.0 / 11.0}) {
    const auto s = build(128, q, 0, 5000, 21);
    const std::vector<std::uint32_t> y(s.maxima().begin(), s.maxima().end());
    const double c = s.estimate().c_hat;
    EXPECT_NEAR(geometric_score(y, q, c) * c / 128.0, 0.0, 1e-8);
    const double ll = oracle::geometric_loglik(y, q, c);
    EXPECT_GE(ll, oracle::geometric_loglik(y, q, c * 1.001));
    EXPECT_GE(ll, oracle::geometric_loglik(y, q, c * 0.999));
  }
}

TEST(GeometricMle, StandardErrorUsesPsi) {
  const auto s = build(64, 0.5, 0, 3000);
  const auto e = s.estimate();
  EXPECT_NEAR(e.std_error, e.c_hat / std::sqrt(64 * psi_infinity(0.5)), 1e-9 * e.c_hat);
  EXPECT_EQ(e.estimator, EstimatorId::GeometricMle);
}

TEST(GeometricMle, AllOnesHasNoRoot) {
  const std::vector<std::uint32_t> y(8, 1);
  try {
    (void)estimate_geometric(y, 0.5, 0.95);
    FAIL();
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Numeric);
  }
}

TEST(GeometricMle, EmptySlot) {
  GeometricMaxSketch s(gcfg(4, 0.5));
  s.update("a");  // every slot set
  EXPECT_NO_THROW((void)estimate_geometric_recursive(s.maxima(), 0.5));
  GeometricMaxSketch e(gcfg(4, 0.5));
  try {
    (void)e.estimate();
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::EmptySketch);
  }
}

// The recursive estimator treats the geometric maximum as exponential. Rounding
// up to an integer shrinks every q^Y by a factor q^U, U ~ U(0,1) in the
// fractional part, so the estimate is inflated by
// 1 / E[q^U] = -log q / (1 - q). This is 4.84% at q = 10/11 and 0.50% at
// q = 0.99; the MLE itself carries no such bias.
TEST(GeometricMle, RecursiveGapMatchesDiscretizationBias) {
  for (double q : {10.0 / 11.0, 0.99}) {
    const auto s = build(1024, q, 0, 100000, 5);
    const double mle = s.estimate().c_hat;
    const double rec = s.estimate_recursive();
    const double expected_gap = -std::log(q) / (1 - q) - 1;
    EXPECT_NEAR((rec - mle) / mle, expected_gap, 0.005) << q;
    EXPECT_LT(std::fabs(mle - 1e5) / 1e5, 0.10);
  }
}

TEST(GeometricMle, RecursiveCloseToMleNearOne) {
  const auto s = build(1024, 0.99, 0, 100000, 6);
  EXPECT_LT(std::fabs(s.estimate_recursive() - s.estimate().c_hat) / s.estimate().c_hat, 0.01);
}
