#include "cardsketch/any_sketch.hpp"

#include <string>

#include "cardsketch/error.hpp"

namespace cardsketch {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

SketchVariant build(const SketchSpec& s) {
  const auto cfg = [&](Distribution d) { return HashConfig{s.m, s.salt, d}; };
  switch (s.type) {
    case SketchType::MaxUniform:
      return ContinuousMaxSketch(cfg(Distribution::uniform01()));
    case SketchType::MaxExponential:
      return ContinuousMaxSketch(cfg(Distribution::exponential()));
    case SketchType::MaxGeometric:
      return GeometricMaxSketch(cfg(Distribution::geometric(s.q)));
    case SketchType::KthOrder:
      return KthOrderSketch(cfg(Distribution::uniform01()), s.k);
    case SketchType::Bernoulli:
      return BernoulliSketch(cfg(Distribution::bernoulli(s.p)));
    case SketchType::Projection:
      return ProjectionSketch(cfg(Distribution::positive_stable(s.alpha)));
    case SketchType::LogLog:
      return RegisterSketch(BaselineKind::LogLog, s.m, s.salt);
    case SketchType::HyperLogLog:
      return RegisterSketch(BaselineKind::HyperLogLog, s.m, s.salt);
    case SketchType::MinCount:
      return RegisterSketch(BaselineKind::MinCount, s.m, s.salt);
  }
  fail(ErrorKind::Domain, "unknown sketch type");
}

}  // namespace

const char* to_string(SketchType type) noexcept {
  switch (type) {
    case SketchType::MaxUniform: return "max-uniform";
    case SketchType::MaxExponential: return "max-exp";
    case SketchType::MaxGeometric: return "max-geom";
    case SketchType::KthOrder: return "kth";
    case SketchType::Bernoulli: return "bernoulli";
    case SketchType::Projection: return "projection";
    case SketchType::LogLog: return "loglog";
    case SketchType::HyperLogLog: return "hll";
    case SketchType::MinCount: return "mincount";
  }
  return "unknown";
}

SketchType parse_sketch_type(std::string_view tag) {
  for (int t = 1; t <= 9; ++t) {
    const auto type = static_cast<SketchType>(t);
    if (tag == to_string(type)) return type;
  }
  fail(ErrorKind::Domain, "unknown sketch type '" + std::string(tag) + "'");
}

AnySketch::AnySketch(const SketchSpec& spec) : sketch_(build(spec)) {}

AnySketch::AnySketch(SketchVariant sketch) : sketch_(std::move(sketch)) {}

SketchType AnySketch::type() const noexcept {
  return std::visit(
      overloaded{
          [](const ContinuousMaxSketch& s) {
            return s.config().dist.kind == Marginal::Uniform01
                       ? SketchType::MaxUniform
                       : SketchType::MaxExponential;
          },
          [](const GeometricMaxSketch&) { return SketchType::MaxGeometric; },
          [](const BernoulliSketch&) { return SketchType::Bernoulli; },
          [](const KthOrderSketch&) { return SketchType::KthOrder; },
          [](const ProjectionSketch&) { return SketchType::Projection; },
          [](const RegisterSketch& s) {
            switch (s.kind()) {
              case BaselineKind::LogLog: return SketchType::LogLog;
              case BaselineKind::HyperLogLog: return SketchType::HyperLogLog;
              case BaselineKind::MinCount: break;
            }
            return SketchType::MinCount;
          },
      },
      sketch_);
}

SketchSpec AnySketch::spec() const {
  SketchSpec s;
  s.type = type();
  std::visit(overloaded{
                 [&](const RegisterSketch& r) {
                   s.m = r.m();
                   s.salt = r.salt();
                 },
                 [&](const KthOrderSketch& r) {
                   s.m = r.m();
                   s.salt = r.config().salt;
                   s.k = r.k();
                 },
                 [&](const auto& r) {
                   const HashConfig& cfg = r.config();
                   s.m = cfg.m;
                   s.salt = cfg.salt;
                   switch (cfg.dist.kind) {
                     case Marginal::Geometric: s.q = cfg.dist.param; break;
                     case Marginal::Bernoulli: s.p = cfg.dist.param; break;
                     case Marginal::PositiveStable: s.alpha = cfg.dist.param; break;
                     default: break;
                   }
                 },
             },
             sketch_);
  return s;
}

std::uint32_t AnySketch::m() const noexcept {
  return std::visit([](const auto& s) { return s.m(); }, sketch_);
}

void AnySketch::update(std::string_view item, std::int64_t d) {
  std::visit([&](auto& s) { s.update(item, d); }, sketch_);
}

void AnySketch::update(const VariateRow& row, std::int64_t d) {
  std::visit([&](auto& s) { s.update(row, d); }, sketch_);
}

void AnySketch::merge(const AnySketch& other) {
  if (sketch_.index() != other.sketch_.index()) {
    fail(ErrorKind::IncompatibleSketch, "cannot merge sketches of different types");
  }
  std::visit(
      [&](auto& s) {
        using T = std::decay_t<decltype(s)>;
        s.merge(std::get<T>(other.sketch_));
      },
      sketch_);
}

Estimate AnySketch::estimate(double level) const {
  return std::visit([&](const auto& s) { return s.estimate(level); }, sketch_);
}

std::size_t AnySketch::state_bytes() const noexcept {
  return std::visit([](const auto& s) { return s.state_bytes(); }, sketch_);
}

}  // namespace cardsketch
