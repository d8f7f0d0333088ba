#pragma once

// JSON envelope {"format","version","type","m","params","salt","state"} with
// reals written as shortest round-trip decimal strings, and a compact binary
// frame: "CSKB", u16 version, u8 type tag, little-endian payload.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cardsketch/any_sketch.hpp"

namespace cardsketch {

inline constexpr int kSerialVersion = 1;

/// Shortest decimal that parses back to the same double; "-inf"/"inf" for
/// infinities.
std::string format_double(double x);
double parse_double(std::string_view text);

std::string to_json(const AnySketch& sketch, int indent = -1);
AnySketch sketch_from_json(std::string_view text);

std::vector<std::uint8_t> to_binary(const AnySketch& sketch);
AnySketch sketch_from_binary(std::span<const std::uint8_t> bytes);

/// Accepts either encoding; dispatches on the binary magic.
AnySketch parse_sketch(std::string_view bytes);

std::string estimate_to_json(const Estimate& e, int indent = -1);

}  // namespace cardsketch
