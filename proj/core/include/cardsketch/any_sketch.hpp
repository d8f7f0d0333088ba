#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "cardsketch/baselines.hpp"
#include "cardsketch/order_sketch.hpp"
#include "cardsketch/projection_sketch.hpp"

namespace cardsketch {

enum class SketchType : std::uint8_t {
  MaxUniform = 1,
  MaxExponential = 2,
  MaxGeometric = 3,
  KthOrder = 4,
  Bernoulli = 5,
  Projection = 6,
  LogLog = 7,
  HyperLogLog = 8,
  MinCount = 9,
};

/// Type tags: max-uniform, max-exp, max-geom, kth, bernoulli, projection,
/// loglog, hll, mincount.
const char* to_string(SketchType type) noexcept;
SketchType parse_sketch_type(std::string_view tag);

struct SketchSpec {
  SketchType type = SketchType::MaxUniform;
  std::uint32_t m = 256;
  std::uint64_t salt = 0;
  double q = 0.5;
  double p = 0.01;
  double alpha = 0.05;
  std::uint32_t k = 3;

  friend bool operator==(const SketchSpec&, const SketchSpec&) = default;
};

using SketchVariant = std::variant<ContinuousMaxSketch, GeometricMaxSketch,
                                   BernoulliSketch, KthOrderSketch,
                                   ProjectionSketch, RegisterSketch>;

/// Type-erased sketch used by the CLI, the serializers and the harness.
class AnySketch {
 public:
  explicit AnySketch(const SketchSpec& spec);
  explicit AnySketch(SketchVariant sketch);

  SketchType type() const noexcept;
  SketchSpec spec() const;
  std::uint32_t m() const noexcept;

  const SketchVariant& variant() const noexcept { return sketch_; }
  SketchVariant& variant() noexcept { return sketch_; }

  void update(std::string_view item, std::int64_t d = 1);
  void update(const VariateRow& row, std::int64_t d = 1);
  void merge(const AnySketch& other);
  Estimate estimate(double level = 0.95) const;
  std::size_t state_bytes() const noexcept;

  friend bool operator==(const AnySketch&, const AnySketch&) = default;

 private:
  SketchVariant sketch_;
};

}  // namespace cardsketch
