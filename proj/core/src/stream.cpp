#include "cardsketch/stream.hpp"

#include <cmath>
#include <random>
#include <string>
#include <unordered_map>

#include "cardsketch/error.hpp"
#include "cardsketch/seeded_hash.hpp"

namespace cardsketch {

namespace {

std::string item_id(std::uint64_t seed, std::uint64_t index) {
  // mix64 is a bijection, so distinct indices give distinct ids.
  return std::to_string(hashing::mix64(seed + index));
}

std::uint32_t repeat_count(const StreamModel& model, std::mt19937_64& rng) {
  if (model.repetition == RepetitionModel::Fixed) return model.repeats;
  const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
  const double n = std::floor(std::pow(u, -1.0 / 1.5));
  return static_cast<std::uint32_t>(std::min(n, 1000.0));
}

}  // namespace

const char* to_string(RepetitionModel r) noexcept {
  return r == RepetitionModel::Fixed ? "fixed" : "heavy-tailed";
}

const char* to_string(QuantityModel q) noexcept {
  switch (q) {
    case QuantityModel::Ones: return "ones";
    case QuantityModel::RandomPositive: return "random-positive";
    case QuantityModel::InsertDelete: return "insert-delete";
  }
  return "unknown";
}

RepetitionModel parse_repetition(std::string_view s) {
  if (s == "fixed") return RepetitionModel::Fixed;
  if (s == "heavy-tailed") return RepetitionModel::HeavyTailed;
  fail(ErrorKind::Domain, "unknown repetition model '" + std::string(s) + "'");
}

QuantityModel parse_quantity(std::string_view s) {
  if (s == "ones") return QuantityModel::Ones;
  if (s == "random-positive") return QuantityModel::RandomPositive;
  if (s == "insert-delete") return QuantityModel::InsertDelete;
  fail(ErrorKind::Domain, "unknown quantity model '" + std::string(s) + "'");
}

std::vector<StreamElement> generate_stream(const StreamModel& model, std::uint64_t seed) {
  if (model.c < 1) fail(ErrorKind::Domain, "c must be >= 1");
  if (model.repetition == RepetitionModel::Fixed && model.repeats < 1) {
    fail(ErrorKind::Domain, "repeats must be >= 1");
  }
  std::mt19937_64 rng(seed);
  const std::uint64_t id_seed = hashing::mix64(seed ^ 0x5eedf00dULL);
  std::vector<StreamElement> out;
  out.reserve(model.c * (model.repetition == RepetitionModel::Fixed ? model.repeats : 2));

  for (std::uint64_t i = 0; i < model.c; ++i) {
    const std::string id = item_id(id_seed, i);
    const std::uint32_t n = repeat_count(model, rng);
    for (std::uint32_t r = 0; r < n; ++r) {
      std::int64_t d = 1;
      if (model.quantity == QuantityModel::RandomPositive) {
        d = 1 + static_cast<std::int64_t>(bounded(rng, 10));
      }
      out.push_back({id, d});
    }
  }
  if (model.quantity == QuantityModel::InsertDelete) {
    // c transient items, each inserted and later fully deleted.
    for (std::uint64_t i = model.c; i < 2 * model.c; ++i) {
      const std::string id = item_id(id_seed, i);
      const auto d = 1 + static_cast<std::int64_t>(bounded(rng, 10));
      out.push_back({id, d});
      out.push_back({id, -d});
    }
  }
  for (std::size_t i = out.size(); i > 1; --i) {
    std::swap(out[i - 1], out[bounded(rng, i)]);
  }
  return out;
}

std::uint64_t exact_count(std::span<const StreamElement> stream) {
  std::unordered_map<std::string_view, std::int64_t> totals;
  for (const auto& e : stream) totals[e.item] += e.d;
  std::uint64_t live = 0;
  for (const auto& [item, total] : totals) {
    if (total < 0) {
      fail(ErrorKind::Integrity,
           "item '" + std::string(item) + "' has negative cumulative quantity");
    }
    if (total > 0) ++live;
  }
  return live;
}

}  // namespace cardsketch
