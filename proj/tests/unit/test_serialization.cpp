#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "cardsketch/any_sketch.hpp"
#include "cardsketch/error.hpp"
#include "cardsketch/serialization.hpp"
#include "oracles.hpp"

using namespace cardsketch;

namespace {

const SketchType kAllTypes[] = {
    SketchType::MaxUniform, SketchType::MaxExponential, SketchType::MaxGeometric,
    SketchType::KthOrder,   SketchType::Bernoulli,      SketchType::Projection,
    SketchType::LogLog,     SketchType::HyperLogLog,    SketchType::MinCount};

AnySketch filled(SketchType type, std::size_t n = 300) {
  SketchSpec spec;
  spec.type = type;
  spec.m = 64;
  spec.salt = 0xfeedfacecafebeefULL;
  spec.p = 0.02;
  spec.q = 10.0 / 11.0;
  spec.alpha = 0.1;
  spec.k = 3;
  AnySketch s(spec);
  for (const auto& it : oracle::item_range(0, n)) s.update(it);
  if (type == SketchType::Projection) s.update("item-0", -1);  // leaves a mixed total
  return s;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Numeric;
}

}  // namespace

TEST(FormatDouble, RoundTripsBitExact) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20000; ++i) {
    std::uint64_t bits = rng();
    double x;
    std::memcpy(&x, &bits, sizeof x);
    if (!std::isfinite(x)) continue;
    const double y = parse_double(format_double(x));
    ASSERT_EQ(std::memcmp(&x, &y, sizeof x), 0) << format_double(x);
  }
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(parse_double("inf"), std::numeric_limits<double>::infinity());
  EXPECT_EQ(kind_of([] { (void)parse_double("1.5x"); }), ErrorKind::Format);
  EXPECT_EQ(kind_of([] { (void)parse_double(""); }), ErrorKind::Format);
}

TEST(SketchType, Tags) {
  for (auto t : kAllTypes) EXPECT_EQ(parse_sketch_type(to_string(t)), t);
  EXPECT_THROW(parse_sketch_type("bogus"), Error);
}

TEST(Serialization, JsonRoundTripEveryType) {
  for (auto t : kAllTypes) {
    const auto s = filled(t);
    const auto text = to_json(s);
    const auto back = sketch_from_json(text);
    EXPECT_EQ(back, s) << to_string(t);
    EXPECT_EQ(to_json(back), text);
    const auto doc = nlohmann::json::parse(text);
    EXPECT_EQ(doc.at("type"), to_string(t));
    EXPECT_EQ(doc.at("m"), 64);
    EXPECT_EQ(doc.at("version"), kSerialVersion);
    EXPECT_TRUE(doc.contains("params"));
    EXPECT_TRUE(doc.contains("state"));
  }
}

TEST(Serialization, BinaryRoundTripEveryType) {
  for (auto t : kAllTypes) {
    const auto s = filled(t);
    const auto bytes = to_binary(s);
    ASSERT_GE(bytes.size(), 4u);
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "CSKB");
    EXPECT_EQ(sketch_from_binary(bytes), s) << to_string(t);
    const std::string raw(bytes.begin(), bytes.end());
    EXPECT_EQ(parse_sketch(raw), s);
    EXPECT_EQ(parse_sketch(to_json(s, 2)), s);
  }
}

TEST(Serialization, EmptySketchesRoundTrip) {
  for (auto t : kAllTypes) {
    const auto s = filled(t, 0);
    EXPECT_EQ(sketch_from_json(to_json(s)), s);
    EXPECT_EQ(sketch_from_binary(to_binary(s)), s);
  }
}

TEST(Serialization, RestoredSketchKeepsUpdating) {
  for (auto t : kAllTypes) {
    auto a = filled(t, 200);
    auto b = sketch_from_binary(to_binary(a));
    for (const auto& it : oracle::item_range(200, 400)) { a.update(it); b.update(it); }
    EXPECT_EQ(a, b) << to_string(t);
  }
}

TEST(Serialization, MalformedInputIsFormatError) {
  auto bytes = to_binary(filled(SketchType::MaxUniform));
  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_EQ(kind_of([&] { (void)sketch_from_binary(truncated); }), ErrorKind::Format);
  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_EQ(kind_of([&] { (void)sketch_from_binary(trailing); }), ErrorKind::Format);
  auto bad_tag = bytes;
  bad_tag[6] = 42;
  EXPECT_EQ(kind_of([&] { (void)sketch_from_binary(bad_tag); }), ErrorKind::Format);

  EXPECT_EQ(kind_of([] { (void)sketch_from_json("{"); }), ErrorKind::Format);
  EXPECT_EQ(kind_of([] { (void)sketch_from_json("{\"format\":\"cardsketch\"}"); }), ErrorKind::Format);
  auto doc = nlohmann::json::parse(to_json(filled(SketchType::MaxGeometric)));
  doc["params"]["q"] = "1.5";
  EXPECT_EQ(kind_of([&] { (void)sketch_from_json(doc.dump()); }), ErrorKind::Format);
  doc = nlohmann::json::parse(to_json(filled(SketchType::MaxUniform)));
  doc["version"] = 99;
  EXPECT_EQ(kind_of([&] { (void)sketch_from_json(doc.dump()); }), ErrorKind::Format);
  doc = nlohmann::json::parse(to_json(filled(SketchType::MaxUniform)));
  doc["state"].erase(0);
  EXPECT_EQ(kind_of([&] { (void)sketch_from_json(doc.dump()); }), ErrorKind::Format);
}

TEST(Serialization, MergeAcrossEncodings) {
  SketchSpec spec{SketchType::MaxExponential, 32, 5};
  AnySketch a(spec), b(spec), u(spec);
  for (const auto& it : oracle::item_range(0, 100)) { a.update(it); u.update(it); }
  for (const auto& it : oracle::item_range(50, 180)) { b.update(it); u.update(it); }
  auto ra = sketch_from_json(to_json(a));
  ra.merge(sketch_from_binary(to_binary(b)));
  EXPECT_EQ(ra, u);
  EXPECT_THROW(ra.merge(AnySketch(SketchSpec{SketchType::MaxUniform, 32, 5})), Error);
}

TEST(Serialization, EstimateJson) {
  Estimate e{123.5, 4.25, 110.0, 140.0, 0.9, EstimatorId::MaxContinuous, 64};
  const auto doc = nlohmann::json::parse(estimate_to_json(e));
  EXPECT_EQ(doc.at("c_hat").get<double>(), 123.5);
  EXPECT_EQ(doc.at("std_error").get<double>(), 4.25);
  EXPECT_EQ(doc.at("ci")[0].get<double>(), 110.0);
  EXPECT_EQ(doc.at("ci")[1].get<double>(), 140.0);
  EXPECT_EQ(doc.at("level").get<double>(), 0.9);
  EXPECT_EQ(doc.at("m").get<int>(), 64);
  EXPECT_TRUE(doc.at("estimator").is_string());
}

TEST(AnySketch, SpecRoundTrip) {
  for (auto t : kAllTypes) {
    const auto s = filled(t, 10);
    EXPECT_EQ(AnySketch(s.spec()).spec(), s.spec());
    EXPECT_EQ(s.type(), t);
    EXPECT_GT(s.state_bytes(), 0u);
  }
}
