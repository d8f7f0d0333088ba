#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cardsketch/error.hpp"
#include "cardsketch/experiment.hpp"
#include "cardsketch/inference.hpp"

using namespace cardsketch;

namespace {

ExperimentConfig small_config(std::vector<std::string> names, std::uint32_t replicates = 3) {
  ExperimentConfig cfg;
  cfg.c = 500;
  cfg.m = 32;
  cfg.replicates = replicates;
  cfg.seed = 17;
  for (const auto& n : names) cfg.algos.push_back(make_algo(n, cfg));
  return cfg;
}

}  // namespace

TEST(Experiment, MakeAlgoDefaults) {
  ExperimentConfig cfg;
  cfg.c = 1000;
  cfg.m = 64;
  const auto b = make_algo("bernoulli", cfg);
  EXPECT_EQ(b.sketch.type, SketchType::Bernoulli);
  EXPECT_NEAR(b.sketch.p, optimal_lambda() / 1000, 1e-15);
  EXPECT_EQ(b.sketch.m, 64u);
  const auto med = make_algo("median", cfg);
  EXPECT_TRUE(med.median);
  EXPECT_EQ(med.sketch.type, SketchType::Projection);
  EXPECT_THROW(make_algo("nope", cfg), Error);
}

TEST(Experiment, ReportIsDeterministic) {
  const auto cfg = small_config({"max-uniform", "max-geom", "hll", "projection", "median"}, 1);
  const auto a = report_to_json(run_experiment(cfg));
  const auto b = report_to_json(run_experiment(cfg));
  EXPECT_EQ(a, b);
  EXPECT_EQ(report_to_csv(run_experiment(cfg)), report_to_csv(run_experiment(cfg)));
}

TEST(Experiment, ReportShape) {
  const auto cfg = small_config({"max-uniform", "loglog", "mincount", "kth", "bernoulli", "max-exp"}, 4);
  const auto report = run_experiment(cfg);
  ASSERT_EQ(report.algos.size(), 6u);
  for (const auto& r : report.algos) {
    EXPECT_EQ(r.c_hat.size(), 4u);
    EXPECT_EQ(r.failures, 0u) << r.name;
    EXPECT_GT(r.state_bytes, 0u);
    for (double c : r.c_hat) EXPECT_GT(c, 0.0);
    EXPECT_GE(r.mean_pct_error, 0.0);
  }
  EXPECT_TRUE(report.algo("max-uniform").has_pivot);
  EXPECT_FALSE(report.algo("loglog").has_pivot);
  EXPECT_EQ(report.variance_ratios.size(), 6u * 5u);
  EXPECT_THROW((void)report.algo("absent"), Error);

  // Bytes of state follow the cost shapes: floats, small integers, bits.
  EXPECT_EQ(report.algo("max-uniform").state_bytes, 32u * 8u);
  EXPECT_EQ(report.algo("loglog").state_bytes, 32u);
  EXPECT_EQ(report.algo("bernoulli").state_bytes, 4u);

  const auto doc = nlohmann::json::parse(report_to_json(report));
  EXPECT_EQ(doc.at("schema"), ExperimentReport::kSchema);
  std::istringstream csv(report_to_csv(report));
  std::string line;
  int rows = 0;
  std::getline(csv, line);
  EXPECT_EQ(line, "algo,replicate,c,c_hat,pct_error,ci_lower,ci_upper");
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 6 * 4);
}

TEST(Experiment, SharedSketchesGiveSameEstimates) {
  auto cfg = small_config({"max-uniform"}, 2);
  auto twin = make_algo("max-uniform", cfg);
  twin.name = "twin";
  cfg.algos.push_back(twin);
  const auto r = run_experiment(cfg);
  EXPECT_EQ(r.algos[0].c_hat, r.algos[1].c_hat);
}

TEST(Experiment, PercentError) {
  EXPECT_EQ(percent_error(110, 100), 10.0);
  EXPECT_EQ(percent_error(90, 100), 10.0);
}

TEST(Experiment, InsertDeleteOnlyForProjection) {
  auto cfg = small_config({"projection", "median"}, 2);
  cfg.quantity = QuantityModel::InsertDelete;
  EXPECT_NO_THROW(cfg.validate());
  const auto r = run_experiment(cfg);
  EXPECT_EQ(r.algos[0].failures, 0u);
  cfg.algos.push_back(make_algo("hll", cfg));
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Experiment, ConfigJson) {
  const auto cfg = config_from_json(R"({"c": 2000, "m": 16, "replicates": 2, "seed": 4,
      "alpha": 0.02, "algos": ["max-geom", "projection", {"name": "geo11", "type": "max-geom", "q": 0.9090909090909091}]})");
  EXPECT_EQ(cfg.c, 2000u);
  ASSERT_EQ(cfg.algos.size(), 3u);
  EXPECT_EQ(cfg.algos[1].sketch.alpha, 0.02);
  EXPECT_EQ(cfg.algos[2].name, "geo11");
  EXPECT_NEAR(cfg.algos[2].sketch.q, 10.0 / 11.0, 1e-15);
  const auto again = config_from_json(config_to_json(cfg));
  EXPECT_EQ(config_to_json(again), config_to_json(cfg));

  EXPECT_THROW(config_from_json("{"), Error);
  EXPECT_THROW(config_from_json(R"({"algos": ["hll", "hll"]})"), Error);
  EXPECT_THROW(config_from_json(R"({"c": 0, "algos": ["hll"]})"), Error);
  EXPECT_THROW(config_from_json(R"({"c": 10})"), Error);
}

TEST(Experiment, TimingOnlyWhenRequested) {
  auto cfg = small_config({"hll"}, 1);
  auto doc = nlohmann::json::parse(report_to_json(run_experiment(cfg)));
  EXPECT_FALSE(doc.dump().find("seconds") != std::string::npos);
  cfg.record_timing = true;
  doc = nlohmann::json::parse(report_to_json(run_experiment(cfg)));
  EXPECT_TRUE(doc.dump().find("seconds") != std::string::npos);
}
