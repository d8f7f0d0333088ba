#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cardsketch/element.hpp"

namespace cardsketch {

enum class RepetitionModel : std::uint8_t {
  Fixed,        // every distinct item appears exactly `repeats` times
  HeavyTailed,  // Pareto(1.5) repeat counts, capped at 1000
};

enum class QuantityModel : std::uint8_t {
  Ones,            // d = 1
  RandomPositive,  // d uniform on 1..10
  InsertDelete,    // live items plus c extra items that are inserted then deleted
};

const char* to_string(RepetitionModel r) noexcept;
const char* to_string(QuantityModel q) noexcept;
RepetitionModel parse_repetition(std::string_view s);
QuantityModel parse_quantity(std::string_view s);

struct StreamModel {
  std::uint64_t c = 1000;
  RepetitionModel repetition = RepetitionModel::Fixed;
  std::uint32_t repeats = 1;
  QuantityModel quantity = QuantityModel::Ones;
};

/// Exactly c live distinct items, ids derived from `seed`, shuffled by a
/// seed-determined permutation.
std::vector<StreamElement> generate_stream(const StreamModel& model, std::uint64_t seed);

/// Number of items whose cumulative quantity is positive. Throws Integrity if
/// any item ends negative.
std::uint64_t exact_count(std::span<const StreamElement> stream);

__extension__ typedef unsigned __int128 uint128_t;

/// Uniform integer in [0, bound) from a 64-bit generator output stream
/// (Lemire's multiply-and-reject); identical on every platform.
template <class Engine>
std::uint64_t bounded(Engine& eng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = eng();
    const uint128_t product = static_cast<uint128_t>(x) * bound;
    if (static_cast<std::uint64_t>(product) >= threshold) {
      return static_cast<std::uint64_t>(product >> 64);
    }
  }
}

}  // namespace cardsketch
