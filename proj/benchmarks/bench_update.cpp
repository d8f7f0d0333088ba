#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "cardsketch/any_sketch.hpp"
#include "cardsketch/stream.hpp"

namespace cs = cardsketch;

namespace {

std::vector<std::string> items(std::size_t n) {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back("item-" + std::to_string(i));
  return out;
}

void BM_Update(benchmark::State& state, cs::SketchType type) {
  cs::SketchSpec spec;
  spec.type = type;
  spec.m = static_cast<std::uint32_t>(state.range(0));
  spec.salt = 42;
  spec.p = 0.001;
  const auto ids = items(4096);
  cs::AnySketch sketch(spec);
  std::size_t i = 0;
  for (auto _ : state) {
    sketch.update(ids[i++ & 4095]);
  }
  state.SetItemsProcessed(state.iterations());
  state.counters["state_bytes"] = static_cast<double>(sketch.state_bytes());
}

void BM_Estimate(benchmark::State& state, cs::SketchType type) {
  cs::SketchSpec spec;
  spec.type = type;
  spec.m = static_cast<std::uint32_t>(state.range(0));
  spec.salt = 42;
  cs::AnySketch sketch(spec);
  for (const auto& id : items(20000)) sketch.update(id);
  for (auto _ : state) benchmark::DoNotOptimize(sketch.estimate());
}

}  // namespace

BENCHMARK_CAPTURE(BM_Update, max_uniform, cs::SketchType::MaxUniform)->Arg(512)->Arg(1024);
BENCHMARK_CAPTURE(BM_Update, max_exp, cs::SketchType::MaxExponential)->Arg(1024);
BENCHMARK_CAPTURE(BM_Update, max_geom, cs::SketchType::MaxGeometric)->Arg(1024);
BENCHMARK_CAPTURE(BM_Update, kth, cs::SketchType::KthOrder)->Arg(256);
BENCHMARK_CAPTURE(BM_Update, bernoulli, cs::SketchType::Bernoulli)->Arg(1024);
BENCHMARK_CAPTURE(BM_Update, projection, cs::SketchType::Projection)->Arg(64)->Arg(1024);
BENCHMARK_CAPTURE(BM_Update, hll, cs::SketchType::HyperLogLog)->Arg(1024);
BENCHMARK_CAPTURE(BM_Update, loglog, cs::SketchType::LogLog)->Arg(1024);
BENCHMARK_CAPTURE(BM_Update, mincount, cs::SketchType::MinCount)->Arg(1024);

BENCHMARK_CAPTURE(BM_Estimate, max_uniform, cs::SketchType::MaxUniform)->Arg(1024);
BENCHMARK_CAPTURE(BM_Estimate, max_geom, cs::SketchType::MaxGeometric)->Arg(1024);
BENCHMARK_CAPTURE(BM_Estimate, hll, cs::SketchType::HyperLogLog)->Arg(1024);

BENCHMARK_MAIN();
