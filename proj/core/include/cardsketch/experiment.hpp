#pragma once

// Replicated simulation harness. Each replicate draws a fresh stream and a
// fresh salt from the experiment seed, feeds every element once to all
// configured sketches (sketches with identical specs are shared), then
// estimates.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cardsketch/any_sketch.hpp"
#include "cardsketch/stats.hpp"
#include "cardsketch/stream.hpp"

namespace cardsketch {

struct AlgoSpec {
  std::string name;
  SketchSpec sketch;
  bool median = false;  // projection sketch read through the median estimator
};

struct ExperimentConfig {
  std::uint64_t c = 10000;
  std::uint32_t m = 512;
  std::vector<AlgoSpec> algos;
  RepetitionModel repetition = RepetitionModel::Fixed;
  std::uint32_t repeats = 1;
  QuantityModel quantity = QuantityModel::Ones;
  std::uint32_t replicates = 100;
  std::uint64_t seed = 1;
  double level = 0.95;
  bool record_timing = false;  // wall-clock makes the report non-reproducible

  void validate() const;
};

/// Algorithm from a short name: max-uniform, max-exp, max-geom, kth,
/// bernoulli, projection, median, loglog, hll, mincount. Parameters not
/// given take the experiment defaults (q = 1/2, alpha = 0.05, k = 3,
/// p = lambda_0 / c).
AlgoSpec make_algo(std::string_view name, const ExperimentConfig& cfg);

ExperimentConfig config_from_json(std::string_view text);
std::string config_to_json(const ExperimentConfig& cfg, int indent = -1);

struct AlgoResult {
  std::string name;
  std::string type;
  std::string estimator;
  std::uint32_t m = 0;
  std::vector<double> c_hat;  // NaN where the replicate failed
  std::vector<double> ci_lower;
  std::vector<double> ci_upper;
  std::uint32_t failures = 0;
  std::vector<std::string> failure_messages;  // distinct messages, first 5

  double mean_c_hat = 0.0;
  double var_c_hat = 0.0;
  double rel_sd = 0.0;         // sd(c_hat) / c
  double mean_pct_error = 0.0;
  double sd_pct_error = 0.0;
  double empirical_are = 0.0;  // (c^2 / m) / var(c_hat)
  double coverage = 0.0;       // fraction of intervals containing c

  bool has_pivot = false;      // exact Gamma(m, 1) pivot c m / c_hat
  stats::KsResult pivot_ks;

  std::size_t state_bytes = 0;
  double estimate_seconds = 0.0;
};

struct VarianceRatio {
  std::string numerator;
  std::string denominator;
  double ratio = 0.0;
};

struct ExperimentReport {
  static constexpr const char* kSchema = "cardsketch-report/1";

  ExperimentConfig config;
  std::vector<AlgoResult> algos;
  std::vector<VarianceRatio> variance_ratios;  // every ordered pair
  double ingest_seconds = 0.0;
  double elements_per_second = 0.0;

  const AlgoResult& algo(std::string_view name) const;
};

double percent_error(double c_hat, double c) noexcept;

ExperimentReport run_experiment(const ExperimentConfig& cfg);

std::string report_to_json(const ExperimentReport& report, int indent = 2);

/// One row per (algorithm, replicate).
std::string report_to_csv(const ExperimentReport& report);

}  // namespace cardsketch
