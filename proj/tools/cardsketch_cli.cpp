// cardsketch: build, merge and query sketches; run simulations and analyses.
//
// Exit codes: 0 ok, 2 usage or parameter error, 3 malformed data or sketch,
// 4 numeric failure (no estimate could be produced).

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cardsketch/any_sketch.hpp"
#include "cardsketch/equivalence.hpp"
#include "cardsketch/error.hpp"
#include "cardsketch/experiment.hpp"
#include "cardsketch/inference.hpp"
#include "cardsketch/serialization.hpp"
#include "cardsketch/stats.hpp"
#include "cardsketch/stream.hpp"

namespace cs = cardsketch;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

int exit_code(cs::ErrorKind kind) {
  switch (kind) {
    case cs::ErrorKind::Domain:
    case cs::ErrorKind::IndexOutOfRange:
      return kExitUsage;
    case cs::ErrorKind::Format:
    case cs::ErrorKind::Integrity:
    case cs::ErrorKind::IncompatibleSketch:
    case cs::ErrorKind::UnsupportedDeletion:
      return kExitData;
    case cs::ErrorKind::EmptySketch:
    case cs::ErrorKind::DegenerateSketch:
    case cs::ErrorKind::InsufficientData:
    case cs::ErrorKind::Saturation:
    case cs::ErrorKind::InvalidState:
    case cs::ErrorKind::Numeric:
      return kExitNumeric;
  }
  return kExitNumeric;
}

std::string read_all(std::istream& in) {
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_file(const std::string& path) {
  if (path == "-") return read_all(std::cin);
  std::ifstream in(path, std::ios::binary);
  if (!in) cs::fail(cs::ErrorKind::Format, "cannot open '" + path + "'");
  return read_all(in);
}

void write_output(const std::string& path, const std::string& bytes) {
  if (path.empty() || path == "-") {
    std::cout.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) cs::fail(cs::ErrorKind::Format, "cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string encode(const cs::AnySketch& sketch, const std::string& format) {
  if (format == "binary") {
    const auto bytes = cs::to_binary(sketch);
    return {bytes.begin(), bytes.end()};
  }
  return cs::to_json(sketch) + "\n";
}

// One element per line: <item>[TAB<d>], d defaults to 1.
void ingest(std::istream& in, cs::AnySketch& sketch) {
  std::string line;
  std::uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::int64_t d = 1;
    std::string_view item = line;
    if (const auto tab = line.find('\t'); tab != std::string::npos) {
      item = std::string_view(line).substr(0, tab);
      const std::string_view dv = std::string_view(line).substr(tab + 1);
      auto [ptr, ec] = std::from_chars(dv.data(), dv.data() + dv.size(), d);
      if (ec != std::errc{} || ptr != dv.data() + dv.size()) {
        cs::fail(cs::ErrorKind::Format,
                 "line " + std::to_string(lineno) + ": quantity is not an integer");
      }
    }
    sketch.update(item, d);
  }
}

int run_sketch(const std::string& type, std::uint32_t m, std::uint64_t seed, double q,
               double p, double alpha, std::uint32_t k, const std::string& in_path,
               const std::string& out_path, const std::string& format) {
  cs::SketchSpec spec;
  spec.type = cs::parse_sketch_type(type);
  spec.m = m;
  spec.salt = seed;
  spec.q = q;
  spec.p = p;
  spec.alpha = alpha;
  spec.k = k;
  cs::AnySketch sketch(spec);
  if (in_path == "-") {
    ingest(std::cin, sketch);
  } else {
    std::ifstream in(in_path);
    if (!in) cs::fail(cs::ErrorKind::Format, "cannot open '" + in_path + "'");
    ingest(in, sketch);
  }
  write_output(out_path, encode(sketch, format));
  return kExitOk;
}

int run_merge(const std::vector<std::string>& paths, const std::string& out_path,
              const std::string& format) {
  cs::AnySketch merged = cs::parse_sketch(read_file(paths.front()));
  for (std::size_t i = 1; i < paths.size(); ++i) {
    merged.merge(cs::parse_sketch(read_file(paths[i])));
  }
  write_output(out_path, encode(merged, format));
  return kExitOk;
}

int run_estimate(const std::string& path, double level, bool median) {
  const cs::AnySketch sketch = cs::parse_sketch(read_file(path));
  const auto* proj = std::get_if<cs::ProjectionSketch>(&sketch.variant());
  if (proj && proj->alpha() > 0.1) {
    std::cerr << "warning: alpha=" << proj->alpha()
              << " is large; the projection pivot is only approximate\n";
  }
  try {
    if (median) {
      if (!proj) cs::fail(cs::ErrorKind::Domain, "--median needs a projection sketch");
      json j;
      j["c_hat"] = proj->median_estimate();
      j["estimator"] = cs::to_string(cs::EstimatorId::ProjectionMedian);
      j["m"] = proj->m();
      std::cout << j.dump() << "\n";
      return kExitOk;
    }
    std::cout << cs::estimate_to_json(sketch.estimate(level)) << "\n";
  } catch (const cs::SaturationError& e) {
    json j;
    j["error"] = cs::to_string(e.kind());
    j["message"] = e.what();
    j["lower_bound"] = e.lower_bound();
    j["level"] = level;
    std::cout << j.dump() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}

int run_simulate(const std::string& config_path, const std::string& json_out,
                 const std::string& csv_out, bool timing) {
  cs::ExperimentConfig cfg = cs::config_from_json(read_file(config_path));
  if (timing) cfg.record_timing = true;
  const cs::ExperimentReport report = cs::run_experiment(cfg);
  write_output(json_out, cs::report_to_json(report) + "\n");
  if (!csv_out.empty()) write_output(csv_out, cs::report_to_csv(report));
  return kExitOk;
}

std::vector<double> numbers(const json& grid, const char* key, std::vector<double> fallback) {
  if (!grid.contains(key)) return fallback;
  return grid.at(key).get<std::vector<double>>();
}

int run_analyze(const std::string& grid_path) {
  json grid = json::object();
  if (!grid_path.empty()) {
    try {
      grid = json::parse(read_file(grid_path));
    } catch (const json::exception& e) {
      cs::fail(cs::ErrorKind::Format, std::string("invalid grid JSON: ") + e.what());
    }
  }
  json out;
  try {
    const double lambda0 = cs::optimal_lambda();
    out["lambda0"] = lambda0;
    out["are_lambda0"] = cs::are_bernoulli(lambda0);
    for (double l : numbers(grid, "lambda", {0.5, 1.0, lambda0, 2.0, 4.0})) {
      out["are"].push_back({{"lambda", l}, {"are", cs::are_bernoulli(l)}});
    }
    for (double q : numbers(grid, "q", {0.5, 10.0 / 11.0})) {
      out["psi_infinity"].push_back({{"q", q}, {"value", cs::psi_infinity(q)}});
    }
    const auto eps = numbers(grid, "epsilon", {0.05, 0.1});
    for (double e : eps) {
      for (double m : numbers(grid, "m", {256})) {
        const auto b = cs::chernoff_bounds(e, static_cast<std::uint32_t>(m));
        out["chernoff"].push_back({{"epsilon", e}, {"m", b.m}, {"c1", b.c1},
                                   {"c2", b.c2}, {"upper", b.upper}, {"lower", b.lower}});
      }
    }
    const double c = grid.value("c", 1e6);
    const double q = grid.value("storage_q", 0.5);
    for (double e : eps) {
      for (double delta : numbers(grid, "delta", {0.05})) {
        const auto s = cs::required_m(e, delta, c, q);
        out["required_m"].push_back({{"epsilon", e}, {"delta", delta}, {"m", s.m},
                                     {"register_bits", s.register_bits},
                                     {"storage_bits", s.storage_bits}});
      }
    }
  } catch (const json::exception& e) {
    cs::fail(cs::ErrorKind::Format, std::string("malformed grid: ") + e.what());
  }
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

int run_equivalence(std::uint64_t c, std::uint32_t m, const std::vector<double>& alphas,
                    std::uint32_t runs, std::uint64_t seed) {
  json out;
  out["c"] = c;
  out["m"] = m;
  out["runs"] = runs;
  cs::StreamModel model;
  model.c = c;
  for (double alpha : alphas) {
    std::vector<double> medians;
    std::uint64_t checks = 0;
    std::uint64_t violations = 0;
    double worst = 0.0;
    for (std::uint32_t r = 0; r < runs; ++r) {
      const std::uint64_t rseed = cs::hashing::mix64(seed + r);
      const auto stream = cs::generate_stream(model, rseed);
      const auto res = cs::coupled_residuals(stream, m, alpha, rseed);
      medians.push_back(res.median_abs_residual);
      checks += res.sandwich_checks;
      violations += res.sandwich_violations;
      worst = std::max(worst, res.max_abs_residual);
    }
    out["alphas"].push_back({{"alpha", alpha},
                             {"median_abs_residual", cs::stats::median(medians)},
                             {"max_abs_residual", worst},
                             {"sandwich_checks", checks},
                             {"sandwich_violations", violations}});
  }
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cardsketch: streaming cardinality sketches"};
  app.require_subcommand(1);

  std::string type;
  std::uint32_t m = 256;
  std::uint64_t seed = 0;
  double q = 0.5;
  double p = 0.01;
  double alpha = 0.05;
  std::uint32_t k = 3;
  std::string in_path = "-";
  std::string out_path;
  std::string format = "json";

  auto* sketch = app.add_subcommand("sketch", "Build a sketch from a stream");
  sketch->add_option("--type", type, "Sketch type")
      ->required()
      ->check(CLI::IsMember({"max-uniform", "max-exp", "max-geom", "kth", "bernoulli",
                             "projection", "loglog", "hll", "mincount"}));
  sketch->add_option("--m", m, "Number of hash streams or registers")->required();
  sketch->add_option("--seed", seed, "Global hash salt")->required();
  sketch->add_option("--q", q, "Geometric parameter");
  sketch->add_option("--p", p, "Bernoulli rate");
  sketch->add_option("--alpha", alpha, "Stable index");
  sketch->add_option("--k", k, "Order statistic for kth");
  sketch->add_option("--in", in_path, "Input file, '-' for stdin");
  sketch->add_option("--out", out_path, "Output file (default stdout)");
  sketch->add_option("--format", format)->check(CLI::IsMember({"json", "binary"}));

  std::vector<std::string> merge_inputs;
  auto* merge = app.add_subcommand("merge", "Merge sketches built with identical settings");
  merge->add_option("sketches", merge_inputs, "Sketch files")->required();
  merge->add_option("--out", out_path, "Output file (default stdout)");
  merge->add_option("--format", format)->check(CLI::IsMember({"json", "binary"}));

  std::string sketch_path;
  double level = 0.95;
  bool median = false;
  auto* estimate = app.add_subcommand("estimate", "Estimate cardinality from a sketch");
  estimate->add_option("sketch", sketch_path, "Sketch file, '-' for stdin")->required();
  estimate->add_option("--level", level, "Confidence level");
  estimate->add_flag("--median", median, "Median estimator (projection sketches)");

  std::string config_path;
  std::string json_out;
  std::string csv_out;
  bool timing = false;
  auto* simulate = app.add_subcommand("simulate", "Run a replicated experiment");
  simulate->add_option("--config", config_path, "Experiment config JSON")->required();
  simulate->add_option("--out", json_out, "Report JSON file (default stdout)");
  simulate->add_option("--csv", csv_out, "Per-replicate CSV file");
  simulate->add_flag("--timing", timing, "Record wall-clock timings in the report");

  std::string grid_path;
  auto* analyze = app.add_subcommand("analyze", "Tabulate efficiency constants and bounds");
  analyze->add_option("--grid", grid_path, "Parameter grid JSON");

  std::uint64_t eq_c = 10000;
  std::uint32_t eq_m = 256;
  std::vector<double> alphas{0.2, 0.1, 0.05, 0.02};
  std::uint32_t runs = 5;
  std::uint64_t eq_seed = 1;
  auto* equivalence = app.add_subcommand("equivalence", "Coupled projection/max residuals");
  equivalence->add_option("--c", eq_c, "Cardinality")->required();
  equivalence->add_option("--m", eq_m, "Number of streams")->required();
  equivalence->add_option("--alphas", alphas, "Stable indices")->delimiter(',');
  equivalence->add_option("--runs", runs, "Independent runs per alpha");
  equivalence->add_option("--seed", eq_seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sketch) {
      return run_sketch(type, m, seed, q, p, alpha, k, in_path, out_path, format);
    }
    if (*merge) return run_merge(merge_inputs, out_path, format);
    if (*estimate) return run_estimate(sketch_path, level, median);
    if (*simulate) return run_simulate(config_path, json_out, csv_out, timing);
    if (*analyze) return run_analyze(grid_path);
    if (*equivalence) return run_equivalence(eq_c, eq_m, alphas, runs, eq_seed);
  } catch (const cs::Error& e) {
    std::cerr << "error (" << cs::to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
