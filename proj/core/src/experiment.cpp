#include "cardsketch/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "cardsketch/error.hpp"
#include "cardsketch/inference.hpp"
#include "cardsketch/serialization.hpp"

namespace cardsketch {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::uint64_t replicate_seed(std::uint64_t seed, std::uint32_t rep) {
  return hashing::mix64(seed ^ hashing::mix64(rep + 1ULL));
}

bool is_register_type(SketchType t) {
  return t == SketchType::LogLog || t == SketchType::HyperLogLog || t == SketchType::MinCount;
}

bool accepts_deletions(const AlgoSpec& a) {
  return a.sketch.type == SketchType::Projection;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (c < 1) fail(ErrorKind::Domain, "c must be >= 1");
  if (m < 1) fail(ErrorKind::Domain, "m must be >= 1");
  if (replicates < 1) fail(ErrorKind::Domain, "replicates must be >= 1");
  if (algos.empty()) fail(ErrorKind::Domain, "at least one algorithm is required");
  if (repetition == RepetitionModel::Fixed && repeats < 1) {
    fail(ErrorKind::Domain, "repeats must be >= 1");
  }
  check_level(level);
  for (const auto& a : algos) {
    if (quantity == QuantityModel::InsertDelete && !accepts_deletions(a)) {
      fail(ErrorKind::Domain, "insert-delete streams need projection sketches ('" +
                                  a.name + "' cannot delete)");
    }
    AnySketch probe(a.sketch);  // validates parameters
    (void)probe;
  }
}

AlgoSpec make_algo(std::string_view name, const ExperimentConfig& cfg) {
  AlgoSpec a;
  a.name = std::string(name);
  a.sketch.m = cfg.m;
  a.sketch.q = 0.5;
  a.sketch.alpha = 0.05;
  a.sketch.k = 3;
  a.sketch.p = std::min(0.5, optimal_lambda() / static_cast<double>(cfg.c));
  if (name == "median") {
    a.sketch.type = SketchType::Projection;
    a.median = true;
  } else {
    a.sketch.type = parse_sketch_type(name);
  }
  return a;
}

ExperimentConfig config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, std::string("invalid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    cfg.c = j.value("c", cfg.c);
    cfg.m = j.value("m", cfg.m);
    cfg.replicates = j.value("replicates", cfg.replicates);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.level = j.value("level", cfg.level);
    cfg.repeats = j.value("repeats", cfg.repeats);
    cfg.record_timing = j.value("record_timing", cfg.record_timing);
    if (j.contains("repetition")) {
      cfg.repetition = parse_repetition(j["repetition"].get<std::string>());
    }
    if (j.contains("quantity")) cfg.quantity = parse_quantity(j["quantity"].get<std::string>());
    if (!j.contains("algos") || !j["algos"].is_array()) {
      fail(ErrorKind::Format, "config needs an 'algos' array");
    }
    for (const auto& entry : j["algos"]) {
      if (entry.is_string()) {
        AlgoSpec a = make_algo(entry.get<std::string>(), cfg);
        if (j.contains("q")) a.sketch.q = j["q"].get<double>();
        if (j.contains("p")) a.sketch.p = j["p"].get<double>();
        if (j.contains("alpha")) a.sketch.alpha = j["alpha"].get<double>();
        if (j.contains("k")) a.sketch.k = j["k"].get<std::uint32_t>();
        cfg.algos.push_back(a);
        continue;
      }
      if (!entry.is_object()) fail(ErrorKind::Format, "algo entries are names or objects");
      const std::string type = entry.value("type", entry.value("name", std::string{}));
      AlgoSpec a = make_algo(type, cfg);
      a.name = entry.value("name", type);
      a.sketch.q = entry.value("q", j.value("q", a.sketch.q));
      a.sketch.p = entry.value("p", j.value("p", a.sketch.p));
      a.sketch.alpha = entry.value("alpha", j.value("alpha", a.sketch.alpha));
      a.sketch.k = entry.value("k", j.value("k", a.sketch.k));
      a.sketch.m = entry.value("m", a.sketch.m);
      cfg.algos.push_back(a);
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, std::string("malformed config: ") + e.what());
  }
  std::map<std::string, int> seen;
  for (const auto& a : cfg.algos) {
    if (seen[a.name]++ > 0) fail(ErrorKind::Format, "duplicate algo name '" + a.name + "'");
  }
  cfg.validate();
  return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg, int indent) {
  json j;
  j["c"] = cfg.c;
  j["m"] = cfg.m;
  j["replicates"] = cfg.replicates;
  j["seed"] = cfg.seed;
  j["level"] = cfg.level;
  j["repetition"] = to_string(cfg.repetition);
  j["repeats"] = cfg.repeats;
  j["quantity"] = to_string(cfg.quantity);
  j["record_timing"] = cfg.record_timing;
  json algos = json::array();
  for (const auto& a : cfg.algos) {
    json o;
    o["name"] = a.name;
    o["type"] = a.median ? "median" : to_string(a.sketch.type);
    o["m"] = a.sketch.m;
    switch (a.sketch.type) {
      case SketchType::MaxGeometric: o["q"] = a.sketch.q; break;
      case SketchType::Bernoulli: o["p"] = a.sketch.p; break;
      case SketchType::Projection: o["alpha"] = a.sketch.alpha; break;
      case SketchType::KthOrder: o["k"] = a.sketch.k; break;
      default: break;
    }
    algos.push_back(o);
  }
  j["algos"] = algos;
  return j.dump(indent);
}

const AlgoResult& ExperimentReport::algo(std::string_view name) const {
  for (const auto& a : algos) {
    if (a.name == name) return a;
  }
  fail(ErrorKind::Domain, "no algorithm named '" + std::string(name) + "' in report");
}

double percent_error(double c_hat, double c) noexcept {
  return 100.0 * std::fabs(c_hat - c) / c;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const double c = static_cast<double>(cfg.c);
  const std::size_t n_algos = cfg.algos.size();

  ExperimentReport report;
  report.config = cfg;
  report.algos.resize(n_algos);
  for (std::size_t a = 0; a < n_algos; ++a) {
    auto& r = report.algos[a];
    r.name = cfg.algos[a].name;
    r.type = cfg.algos[a].median ? "median" : to_string(cfg.algos[a].sketch.type);
    r.m = cfg.algos[a].sketch.m;
  }

  StreamModel model;
  model.c = cfg.c;
  model.repetition = cfg.repetition;
  model.repeats = cfg.repeats;
  model.quantity = cfg.quantity;

  std::uint64_t total_elements = 0;
  for (std::uint32_t rep = 0; rep < cfg.replicates; ++rep) {
    const std::uint64_t rseed = replicate_seed(cfg.seed, rep);
    const auto stream = generate_stream(model, rseed);
    total_elements += stream.size();

    // One sketch per distinct spec; the median estimator reads the same
    // projection sketch as the projection estimator.
    std::vector<SketchSpec> specs;
    std::vector<std::size_t> slot(n_algos);
    for (std::size_t a = 0; a < n_algos; ++a) {
      SketchSpec s = cfg.algos[a].sketch;
      s.salt = rseed;
      auto it = std::find(specs.begin(), specs.end(), s);
      slot[a] = static_cast<std::size_t>(it - specs.begin());
      if (it == specs.end()) specs.push_back(s);
    }
    std::vector<AnySketch> sketches;
    sketches.reserve(specs.size());
    // Register sketches read only the item digest, so the row is as wide as
    // the widest sketch that consumes per-stream variates.
    std::uint32_t max_m = 0;
    for (const auto& s : specs) {
      sketches.emplace_back(s);
      if (!is_register_type(s.type)) max_m = std::max(max_m, s.m);
    }

    const auto t0 = Clock::now();
    VariateRow row;
    for (const auto& e : stream) {
      row.assign(e.item, rseed, max_m);
      for (auto& s : sketches) s.update(row, e.d);
    }
    report.ingest_seconds += seconds_since(t0);

    for (std::size_t a = 0; a < n_algos; ++a) {
      auto& r = report.algos[a];
      const AnySketch& sk = sketches[slot[a]];
      r.state_bytes = sk.state_bytes();
      const auto t1 = Clock::now();
      double est = std::numeric_limits<double>::quiet_NaN();
      double lo = est;
      double hi = est;
      try {
        if (cfg.algos[a].median) {
          est = std::get<ProjectionSketch>(sk.variant()).median_estimate();
          r.estimator = to_string(EstimatorId::ProjectionMedian);
        } else {
          const Estimate e = sk.estimate(cfg.level);
          est = e.c_hat;
          lo = e.ci_lower;
          hi = e.ci_upper;
          r.estimator = to_string(e.estimator);
        }
      } catch (const Error& err) {
        ++r.failures;
        if (r.failure_messages.size() < 5 &&
            std::find(r.failure_messages.begin(), r.failure_messages.end(),
                      err.what()) == r.failure_messages.end()) {
          r.failure_messages.emplace_back(err.what());
        }
      }
      r.estimate_seconds += seconds_since(t1);
      r.c_hat.push_back(est);
      r.ci_lower.push_back(lo);
      r.ci_upper.push_back(hi);
    }
  }
  report.elements_per_second =
      report.ingest_seconds > 0 ? total_elements / report.ingest_seconds : 0.0;

  for (auto& r : report.algos) {
    std::vector<double> ok;
    std::vector<double> pct;
    std::size_t covered = 0;
    std::size_t with_ci = 0;
    for (std::size_t i = 0; i < r.c_hat.size(); ++i) {
      if (std::isnan(r.c_hat[i])) continue;
      ok.push_back(r.c_hat[i]);
      pct.push_back(percent_error(r.c_hat[i], c));
      if (!std::isnan(r.ci_lower[i])) {
        ++with_ci;
        if (r.ci_lower[i] <= c && c <= r.ci_upper[i]) ++covered;
      }
    }
    if (ok.empty()) continue;
    r.mean_c_hat = stats::mean(ok);
    r.mean_pct_error = stats::mean(pct);
    if (ok.size() > 1) {
      r.var_c_hat = stats::variance(ok);
      r.sd_pct_error = std::sqrt(stats::variance(pct));
      r.rel_sd = std::sqrt(r.var_c_hat) / c;
      r.empirical_are = r.var_c_hat > 0 ? c * c / (r.m * r.var_c_hat) : 0.0;
    }
    r.coverage = with_ci ? static_cast<double>(covered) / with_ci : 0.0;
    if (r.estimator == to_string(EstimatorId::MaxContinuous) ||
        r.estimator == to_string(EstimatorId::Projection)) {
      r.has_pivot = true;
      std::vector<double> pivots;
      pivots.reserve(ok.size());
      for (double x : ok) pivots.push_back(c * r.m / x);
      const double shape = r.m;
      r.pivot_ks = stats::ks_test(std::move(pivots),
                                  [shape](double x) { return stats::gamma_cdf(shape, x); });
    }
  }

  for (const auto& a : report.algos) {
    for (const auto& b : report.algos) {
      if (&a == &b || b.var_c_hat <= 0.0) continue;
      report.variance_ratios.push_back({a.name, b.name, a.var_c_hat / b.var_c_hat});
    }
  }
  return report;
}

namespace {

json number_or_null(double x) {
  return std::isfinite(x) ? json(x) : json(nullptr);
}

}  // namespace

std::string report_to_json(const ExperimentReport& report, int indent) {
  json j;
  j["schema"] = ExperimentReport::kSchema;
  j["config"] = json::parse(config_to_json(report.config));
  json algos = json::array();
  for (const auto& r : report.algos) {
    json o;
    o["name"] = r.name;
    o["type"] = r.type;
    o["estimator"] = r.estimator;
    o["m"] = r.m;
    o["replicates"] = r.c_hat.size();
    o["failures"] = r.failures;
    o["failure_messages"] = r.failure_messages;
    o["mean_c_hat"] = r.mean_c_hat;
    o["var_c_hat"] = r.var_c_hat;
    o["rel_sd"] = r.rel_sd;
    o["mean_pct_error"] = r.mean_pct_error;
    o["sd_pct_error"] = r.sd_pct_error;
    o["empirical_are"] = r.empirical_are;
    o["ci_coverage"] = r.coverage;
    if (r.has_pivot) {
      o["pivot_ks"] = {{"statistic", r.pivot_ks.statistic},
                       {"p_value", r.pivot_ks.p_value},
                       {"n", r.pivot_ks.n}};
    }
    o["state_bytes"] = r.state_bytes;
    if (report.config.record_timing) o["estimate_seconds"] = r.estimate_seconds;
    json reps = json::array();
    for (std::size_t i = 0; i < r.c_hat.size(); ++i) {
      reps.push_back({{"c_hat", number_or_null(r.c_hat[i])},
                      {"pct_error", number_or_null(percent_error(r.c_hat[i],
                                                                 report.config.c))}});
    }
    o["replicate_results"] = reps;
    algos.push_back(o);
  }
  j["algos"] = algos;
  json ratios = json::array();
  for (const auto& v : report.variance_ratios) {
    ratios.push_back({{"numerator", v.numerator},
                      {"denominator", v.denominator},
                      {"ratio", v.ratio}});
  }
  j["variance_ratios"] = ratios;
  if (report.config.record_timing) {
    j["timing"] = {{"ingest_seconds", report.ingest_seconds},
                   {"elements_per_second", report.elements_per_second}};
  }
  return j.dump(indent);
}

std::string report_to_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "algo,replicate,c,c_hat,pct_error,ci_lower,ci_upper\n";
  const double c = static_cast<double>(report.config.c);
  const auto cell = [](double x) {
    return std::isfinite(x) ? format_double(x) : std::string{};
  };
  for (const auto& r : report.algos) {
    for (std::size_t i = 0; i < r.c_hat.size(); ++i) {
      out << r.name << ',' << i << ',' << report.config.c << ',' << cell(r.c_hat[i])
          << ',' << cell(percent_error(r.c_hat[i], c)) << ',' << cell(r.ci_lower[i])
          << ',' << cell(r.ci_upper[i]) << '\n';
    }
  }
  return out.str();
}

}  // namespace cardsketch
