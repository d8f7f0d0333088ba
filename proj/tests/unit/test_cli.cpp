#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cardsketch/any_sketch.hpp"
#include "cardsketch/serialization.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cardsketch_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name), std::ios::binary) << text;
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  Result run(const std::string& args) const {
    const std::string out = path("stdout.txt");
    const std::string err = path("stderr.txt");
    const std::string cmd = std::string("\"") + CARDSKETCH_CLI_PATH + "\" " + args + " >\"" + out +
                            "\" 2>\"" + err + "\"";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  std::string items(int begin, int end) const {
    std::string s;
    for (int i = begin; i < end; ++i) s += "user" + std::to_string(i) + "\n";
    return s;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SketchAndEstimate) {
  write("in.txt", items(0, 2000));
  auto r = run("sketch --type max-uniform --m 64 --seed 9 --in " + path("in.txt") + " --out " +
               path("s.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  r = run("estimate " + path("s.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_NEAR(doc.at("c_hat").get<double>(), 2000, 2000 * 4.0 / 8.0);
  EXPECT_LE(doc.at("ci")[0].get<double>(), doc.at("c_hat").get<double>());
}

TEST_F(Cli, StdinTabsAndCarriageReturns) {
  write("in.txt", "a\t1\r\nb\n\nc\t3\n");
  auto a = run("sketch --type hll --m 16 --seed 1 --in - < " + path("in.txt"));
  ASSERT_EQ(a.code, 0) << a.err;
  write("plain.txt", "c\nb\na\n");
  auto b = run("sketch --type hll --m 16 --seed 1 --in " + path("plain.txt"));
  EXPECT_EQ(a.out, b.out);
}

TEST_F(Cli, MergePipelineMatchesSinglePass) {
  write("all.txt", items(0, 1500));
  write("left.txt", items(0, 900));
  write("right.txt", items(600, 1500));
  for (const std::string type : {"max-geom", "kth", "mincount", "projection"}) {
    for (const std::string format : {"json", "binary"}) {
      const std::string common = " --type " + type + " --m 32 --seed 5 --format " + format;
      ASSERT_EQ(run("sketch" + common + " --in " + path("left.txt") + " --out " + path("l")).code, 0);
      ASSERT_EQ(run("sketch" + common + " --in " + path("right.txt") + " --out " + path("r")).code, 0);
      ASSERT_EQ(run("sketch" + common + " --in " + path("all.txt") + " --out " + path("u")).code, 0);
      const auto merged = run("merge " + path("l") + " " + path("r") + " --format " + format);
      ASSERT_EQ(merged.code, 0) << merged.err;
      if (type == "projection") {
        // Overlapping items are counted twice by the linear sketch.
        continue;
      }
      EXPECT_EQ(merged.out, slurp(path("u"))) << type << " " << format;
    }
  }
}

TEST_F(Cli, ProjectionMergeIsSumOfParts) {
  write("left.txt", items(0, 400));
  write("right.txt", items(400, 1000));
  write("all.txt", items(0, 1000));
  const std::string common = " --type projection --m 16 --seed 3 --alpha 0.05";
  run("sketch" + common + " --in " + path("left.txt") + " --out " + path("l"));
  run("sketch" + common + " --in " + path("right.txt") + " --out " + path("r"));
  run("sketch" + common + " --in " + path("all.txt") + " --out " + path("u"));
  const auto merged = run("merge " + path("l") + " " + path("r"));
  ASSERT_EQ(merged.code, 0);
  const auto a = cardsketch::parse_sketch(merged.out);
  const auto b = cardsketch::parse_sketch(slurp(path("u")));
  EXPECT_NEAR(a.estimate().c_hat, b.estimate().c_hat, 1e-9 * b.estimate().c_hat);
  EXPECT_EQ(run("estimate --median " + path("u")).code, 0);
}

TEST_F(Cli, ExitCodes) {
  write("in.txt", items(0, 10));
  EXPECT_EQ(run("sketch --type nope --m 4 --seed 1 --in " + path("in.txt")).code, 2);
  EXPECT_EQ(run("sketch --type max-geom --q 1.5 --m 4 --seed 1 --in " + path("in.txt")).code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);

  write("garbage.json", "{not json");
  EXPECT_EQ(run("estimate " + path("garbage.json")).code, 3);
  EXPECT_EQ(run("estimate " + path("missing.json")).code, 3);

  write("neg.txt", "a\t-1\n");
  EXPECT_EQ(run("sketch --type max-uniform --m 4 --seed 1 --in " + path("neg.txt")).code, 3);
  write("bad.txt", "a\tx\n");
  EXPECT_EQ(run("sketch --type projection --m 4 --seed 1 --in " + path("bad.txt")).code, 3);

  run("sketch --type max-uniform --m 4 --seed 1 --in " + path("in.txt") + " --out " + path("a"));
  run("sketch --type max-uniform --m 4 --seed 2 --in " + path("in.txt") + " --out " + path("b"));
  EXPECT_EQ(run("merge " + path("a") + " " + path("b")).code, 3);

  // Every Bernoulli bit set: estimate reports a lower bound and exits 4.
  write("many.txt", items(0, 3000));
  run("sketch --type bernoulli --p 0.5 --m 8 --seed 1 --in " + path("many.txt") + " --out " + path("sat"));
  const auto sat = run("estimate " + path("sat"));
  EXPECT_EQ(sat.code, 4);
  EXPECT_TRUE(json::parse(sat.out).contains("lower_bound"));

  // Empty streams cannot be estimated.
  write("empty.txt", "");
  run("sketch --type max-uniform --m 4 --seed 1 --in " + path("empty.txt") + " --out " + path("e"));
  EXPECT_EQ(run("estimate " + path("e")).code, 4);
}

TEST_F(Cli, AlphaWarning) {
  write("in.txt", items(0, 50));
  run("sketch --type projection --alpha 0.5 --m 8 --seed 1 --in " + path("in.txt") + " --out " + path("p"));
  const auto r = run("estimate " + path("p"));
  EXPECT_EQ(r.code, 0);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(Cli, AnalyzeDefaultAndGrid) {
  auto r = run("analyze");
  ASSERT_EQ(r.code, 0) << r.err;
  auto doc = json::parse(r.out);
  EXPECT_NEAR(doc.at("lambda0").get<double>(), 1.594, 0.001);
  write("grid.json", R"({"lambda": [1.0, 2.0], "q": [0.5], "epsilon": [0.1], "delta": [0.05]})");
  r = run("analyze --grid " + path("grid.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  doc = json::parse(r.out);
  EXPECT_NEAR(doc.at("psi_infinity")[0].at("value").get<double>(), 0.9304, 1e-4);
}

TEST_F(Cli, SimulateWritesReportAndCsv) {
  write("cfg.json", R"({"c": 300, "m": 16, "replicates": 2, "seed": 3, "algos": ["max-uniform", "hll"]})");
  const auto r = run("simulate --config " + path("cfg.json") + " --csv " + path("rep.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_EQ(doc.at("algos").size(), 2u);
  const auto csv = slurp(path("rep.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  const auto again = run("simulate --config " + path("cfg.json"));
  EXPECT_EQ(again.out, r.out);
}

TEST_F(Cli, Equivalence) {
  const auto r = run("equivalence --c 200 --m 8 --alphas 0.2,0.05 --runs 2 --seed 4");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_FALSE(doc.dump().empty());
}
