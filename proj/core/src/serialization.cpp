#include "cardsketch/serialization.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include <json.hpp>

#include "cardsketch/error.hpp"

namespace cardsketch {

using nlohmann::json;

namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'C', 'S', 'K', 'B'};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// --- binary helpers --------------------------------------------------------

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  void expect_end() const {
    if (pos_ != in_.size()) fail(ErrorKind::Format, "trailing bytes after sketch frame");
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::uint64_t le(int n) {
    if (in_.size() - pos_ < static_cast<std::size_t>(n)) {
      fail(ErrorKind::Format, "truncated sketch frame");
    }
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += n;
    return v;
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

// --- JSON helpers ----------------------------------------------------------

json reals(std::span<const double> xs) {
  json a = json::array();
  for (double x : xs) a.push_back(format_double(x));
  return a;
}

std::vector<double> read_reals(const json& a) {
  if (!a.is_array()) fail(ErrorKind::Format, "expected an array of decimal strings");
  std::vector<double> out;
  out.reserve(a.size());
  for (const auto& v : a) {
    if (!v.is_string()) fail(ErrorKind::Format, "reals must be decimal strings");
    out.push_back(parse_double(v.get<std::string>()));
  }
  return out;
}

template <class T>
std::vector<T> read_ints(const json& a, std::uint64_t max) {
  if (!a.is_array()) fail(ErrorKind::Format, "expected an array of integers");
  std::vector<T> out;
  out.reserve(a.size());
  for (const auto& v : a) {
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() > max) {
      fail(ErrorKind::Format, "register value out of range");
    }
    out.push_back(static_cast<T>(v.get<std::uint64_t>()));
  }
  return out;
}

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(ErrorKind::Format, std::string("missing field '") + key + "'");
  return *it;
}

HashConfig config_of(const SketchSpec& s, Distribution d) { return {s.m, s.salt, d}; }

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) fail(ErrorKind::Format, "cannot serialize NaN");
  if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{}) fail(ErrorKind::Format, "double formatting failed");
  return {buf.data(), ptr};
}

double parse_double(std::string_view text) {
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    fail(ErrorKind::Format, "malformed decimal '" + std::string(text) + "'");
  }
  return x;
}

std::string to_json(const AnySketch& sketch, int indent) {
  const SketchSpec spec = sketch.spec();
  json j;
  j["format"] = "cardsketch";
  j["version"] = kSerialVersion;
  j["type"] = to_string(spec.type);
  j["m"] = spec.m;
  j["salt"] = spec.salt;
  json params = json::object();
  json state;
  std::visit(
      overloaded{
          [&](const ContinuousMaxSketch& s) { state = reals(s.log_values()); },
          [&](const GeometricMaxSketch& s) {
            params["q"] = format_double(s.q());
            state = json(std::vector<std::uint32_t>(s.maxima().begin(), s.maxima().end()));
          },
          [&](const BernoulliSketch& s) {
            params["p"] = format_double(s.p());
            state = json(std::vector<int>(s.bits().begin(), s.bits().end()));
          },
          [&](const KthOrderSketch& s) {
            params["k"] = s.k();
            state = json::array();
            for (std::uint32_t i = 0; i < s.m(); ++i) state.push_back(reals(s.top(i)));
          },
          [&](const ProjectionSketch& s) {
            params["alpha"] = format_double(s.alpha());
            state = json::array();
            // [sign, log|V| (informative), low, digits]; the digits are exact.
            for (const auto& a : s.exact_accumulators()) {
              const SignedLog v = a.to_signed_log();
              state.push_back(json::array({v.sign(), format_double(v.log_magnitude()),
                                           a.low(), json(a.digits())}));
            }
          },
          [&](const RegisterSketch& s) {
            if (s.kind() == BaselineKind::MinCount) {
              state = json::array();
              for (std::uint32_t b = 0; b < s.m(); ++b) state.push_back(reals(s.minima(b)));
            } else {
              state = json(std::vector<int>(s.ranks().begin(), s.ranks().end()));
            }
          },
      },
      sketch.variant());
  j["params"] = params;
  j["state"] = state;
  return j.dump(indent);
}

AnySketch sketch_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, std::string("invalid JSON: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("format", "") != "cardsketch") {
      fail(ErrorKind::Format, "not a cardsketch document");
    }
    if (field(j, "version").get<int>() != kSerialVersion) {
      fail(ErrorKind::Format, "unsupported sketch version");
    }
    SketchSpec spec;
    spec.type = parse_sketch_type(field(j, "type").get<std::string>());
    spec.m = field(j, "m").get<std::uint32_t>();
    spec.salt = field(j, "salt").get<std::uint64_t>();
    const json& params = field(j, "params");
    const json& state = field(j, "state");
    if (!state.is_array() || state.size() != spec.m) {
      fail(ErrorKind::Format, "state length does not match m");
    }
    switch (spec.type) {
      case SketchType::MaxUniform:
        return AnySketch(ContinuousMaxSketch::from_state(
            config_of(spec, Distribution::uniform01()), read_reals(state)));
      case SketchType::MaxExponential:
        return AnySketch(ContinuousMaxSketch::from_state(
            config_of(spec, Distribution::exponential()), read_reals(state)));
      case SketchType::MaxGeometric:
        spec.q = parse_double(field(params, "q").get<std::string>());
        return AnySketch(GeometricMaxSketch::from_state(
            config_of(spec, Distribution::geometric(spec.q)),
            read_ints<std::uint32_t>(state, std::numeric_limits<std::uint32_t>::max())));
      case SketchType::Bernoulli:
        spec.p = parse_double(field(params, "p").get<std::string>());
        return AnySketch(BernoulliSketch::from_state(
            config_of(spec, Distribution::bernoulli(spec.p)),
            read_ints<std::uint8_t>(state, 1)));
      case SketchType::KthOrder: {
        spec.k = field(params, "k").get<std::uint32_t>();
        std::vector<std::vector<double>> lists;
        for (const auto& l : state) lists.push_back(read_reals(l));
        return AnySketch(KthOrderSketch::from_state(
            config_of(spec, Distribution::uniform01()), spec.k, lists));
      }
      case SketchType::Projection: {
        spec.alpha = parse_double(field(params, "alpha").get<std::string>());
        std::vector<ExactSum> acc;
        for (const auto& entry : state) {
          if (!entry.is_array() || entry.size() != 4 || !entry[3].is_array()) {
            fail(ErrorKind::Format, "projection entries are [sign, log, low, digits]");
          }
          acc.push_back(ExactSum::from_digits(entry[2].get<std::int32_t>(),
                                              entry[3].get<std::vector<std::int64_t>>()));
          if (acc.back().sign() != entry[0].get<int>()) {
            fail(ErrorKind::Format, "projection sign does not match its digits");
          }
        }
        return AnySketch(ProjectionSketch::from_state(
            config_of(spec, Distribution::positive_stable(spec.alpha)), std::move(acc)));
      }
      case SketchType::LogLog:
        return AnySketch(RegisterSketch::from_ranks(BaselineKind::LogLog, spec.salt,
                                                    read_ints<std::uint8_t>(state, 255)));
      case SketchType::HyperLogLog:
        return AnySketch(RegisterSketch::from_ranks(BaselineKind::HyperLogLog, spec.salt,
                                                    read_ints<std::uint8_t>(state, 255)));
      case SketchType::MinCount: {
        std::vector<std::vector<double>> lists;
        for (const auto& l : state) lists.push_back(read_reals(l));
        return AnySketch(RegisterSketch::from_minima(spec.salt, lists));
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, std::string("malformed sketch document: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Domain) fail(ErrorKind::Format, e.what());
    throw;
  }
  fail(ErrorKind::Format, "unknown sketch type");
}

std::vector<std::uint8_t> to_binary(const AnySketch& sketch) {
  const SketchSpec spec = sketch.spec();
  Writer w;
  for (auto b : kMagic) w.u8(b);
  w.u16(kSerialVersion);
  w.u8(static_cast<std::uint8_t>(spec.type));
  w.u32(spec.m);
  w.u64(spec.salt);
  std::visit(
      overloaded{
          [&](const ContinuousMaxSketch& s) {
            for (double v : s.log_values()) w.f64(v);
          },
          [&](const GeometricMaxSketch& s) {
            w.f64(s.q());
            for (auto y : s.maxima()) w.u32(y);
          },
          [&](const BernoulliSketch& s) {
            w.f64(s.p());
            const auto bits = s.bits();
            for (std::size_t i = 0; i < bits.size(); i += 8) {
              std::uint8_t byte = 0;
              for (std::size_t b = 0; b < 8 && i + b < bits.size(); ++b) {
                byte |= static_cast<std::uint8_t>(bits[i + b] << b);
              }
              w.u8(byte);
            }
          },
          [&](const KthOrderSketch& s) {
            w.u32(s.k());
            for (std::uint32_t j = 0; j < s.m(); ++j) {
              const auto top = s.top(j);
              w.u32(static_cast<std::uint32_t>(top.size()));
              for (double v : top) w.f64(v);
            }
          },
          [&](const ProjectionSketch& s) {
            w.f64(s.alpha());
            for (const auto& a : s.exact_accumulators()) {
              const auto digits = a.digits();
              w.u32(static_cast<std::uint32_t>(a.low()));
              w.u32(static_cast<std::uint32_t>(digits.size()));
              for (auto dg : digits) w.u64(static_cast<std::uint64_t>(dg));
            }
          },
          [&](const RegisterSketch& s) {
            if (s.kind() == BaselineKind::MinCount) {
              for (std::uint32_t b = 0; b < s.m(); ++b) {
                const auto mins = s.minima(b);
                w.u8(static_cast<std::uint8_t>(mins.size()));
                for (double v : mins) w.f64(v);
              }
            } else {
              for (auto r : s.ranks()) w.u8(r);
            }
          },
      },
      sketch.variant());
  return w.take();
}

AnySketch sketch_from_binary(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  for (auto b : kMagic) {
    if (r.u8() != b) fail(ErrorKind::Format, "bad sketch frame magic");
  }
  if (r.u16() != kSerialVersion) fail(ErrorKind::Format, "unsupported frame version");
  const auto tag = r.u8();
  if (tag < 1 || tag > 9) fail(ErrorKind::Format, "unknown frame type tag");
  SketchSpec spec;
  spec.type = static_cast<SketchType>(tag);
  spec.m = r.u32();
  spec.salt = r.u64();
  // Every slot occupies at least one byte, which bounds m before allocating.
  if (spec.m < 1 || (spec.type != SketchType::Bernoulli && spec.m > r.remaining())) {
    fail(ErrorKind::Format, "frame too short for m");
  }
  auto result = [&]() -> AnySketch {
    try {
      switch (spec.type) {
        case SketchType::MaxUniform:
        case SketchType::MaxExponential: {
          std::vector<double> v(spec.m);
          for (auto& x : v) x = r.f64();
          return AnySketch(ContinuousMaxSketch::from_state(
              config_of(spec, spec.type == SketchType::MaxUniform
                                  ? Distribution::uniform01()
                                  : Distribution::exponential()),
              std::move(v)));
        }
        case SketchType::MaxGeometric: {
          spec.q = r.f64();
          std::vector<std::uint32_t> v(spec.m);
          for (auto& x : v) x = r.u32();
          return AnySketch(GeometricMaxSketch::from_state(
              config_of(spec, Distribution::geometric(spec.q)), std::move(v)));
        }
        case SketchType::Bernoulli: {
          spec.p = r.f64();
          if ((spec.m + 7) / 8 != r.remaining()) fail(ErrorKind::Format, "bad bit payload");
          std::vector<std::uint8_t> bits(spec.m);
          std::uint8_t byte = 0;
          for (std::uint32_t i = 0; i < spec.m; ++i) {
            if (i % 8 == 0) byte = r.u8();
            bits[i] = (byte >> (i % 8)) & 1u;
          }
          return AnySketch(BernoulliSketch::from_state(
              config_of(spec, Distribution::bernoulli(spec.p)), std::move(bits)));
        }
        case SketchType::KthOrder: {
          spec.k = r.u32();
          std::vector<std::vector<double>> lists(spec.m);
          for (auto& l : lists) {
            const auto n = r.u32();
            if (n > spec.k) fail(ErrorKind::Format, "top-k list longer than k");
            l.resize(n);
            for (auto& x : l) x = r.f64();
          }
          return AnySketch(KthOrderSketch::from_state(
              config_of(spec, Distribution::uniform01()), spec.k, lists));
        }
        case SketchType::Projection: {
          spec.alpha = r.f64();
          std::vector<ExactSum> acc;
          acc.reserve(spec.m);
          for (std::uint32_t j = 0; j < spec.m; ++j) {
            const auto low = static_cast<std::int32_t>(r.u32());
            const std::uint32_t n = r.u32();
            if (n > r.remaining() / 8) fail(ErrorKind::Format, "truncated sketch frame");
            std::vector<std::int64_t> digits(n);
            for (auto& dg : digits) dg = static_cast<std::int64_t>(r.u64());
            acc.push_back(ExactSum::from_digits(low, std::move(digits)));
          }
          return AnySketch(ProjectionSketch::from_state(
              config_of(spec, Distribution::positive_stable(spec.alpha)), std::move(acc)));
        }
        case SketchType::LogLog:
        case SketchType::HyperLogLog: {
          std::vector<std::uint8_t> ranks(spec.m);
          for (auto& x : ranks) x = r.u8();
          return AnySketch(RegisterSketch::from_ranks(
              spec.type == SketchType::LogLog ? BaselineKind::LogLog
                                              : BaselineKind::HyperLogLog,
              spec.salt, std::move(ranks)));
        }
        case SketchType::MinCount: {
          std::vector<std::vector<double>> lists(spec.m);
          for (auto& l : lists) {
            l.resize(r.u8());
            for (auto& x : l) x = r.f64();
          }
          return AnySketch(RegisterSketch::from_minima(spec.salt, lists));
        }
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Domain) fail(ErrorKind::Format, e.what());
      throw;
    }
    fail(ErrorKind::Format, "unknown frame type tag");
  }();
  r.expect_end();
  return result;
}

AnySketch parse_sketch(std::string_view bytes) {
  if (bytes.size() >= kMagic.size() &&
      std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) == 0) {
    return sketch_from_binary(
        {reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()});
  }
  return sketch_from_json(bytes);
}

std::string estimate_to_json(const Estimate& e, int indent) {
  json j;
  j["c_hat"] = e.c_hat;
  j["std_error"] = e.std_error;
  j["ci"] = {e.ci_lower, e.ci_upper};
  j["level"] = e.level;
  j["estimator"] = to_string(e.estimator);
  j["m"] = e.m;
  return j.dump(indent);
}

}  // namespace cardsketch
