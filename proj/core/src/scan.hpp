#pragma once

#include <algorithm>
#include <cstdint>
#include <span>

namespace cardsketch::detail {

/// 52-bit key of a generator output; uniform_from_bits is increasing in it.
inline std::int64_t uniform_key(std::uint64_t bits) noexcept {
  return static_cast<std::int64_t>(bits >> 12);
}

/// Calls on_hit(j) for every j with uniform_key(bits[j]) > keys[j]. Blocks
/// with no hit cost one vectorizable pass.
/// Number of i < n with uniform_key(bits[i]) > keys[i].
inline std::uint32_t count_exceeding(const std::uint64_t* __restrict bits,
                                     const std::int64_t* __restrict keys,
                                     std::uint32_t n) noexcept {
  std::uint32_t hits = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    hits += static_cast<std::int64_t>(bits[i] >> 12) > keys[i] ? 1u : 0u;
  }
  return hits;
}

template <class OnHit>
void scan_exceeding(std::span<const std::uint64_t> bits, const std::int64_t* keys,
                    std::uint32_t m, OnHit&& on_hit) {
  constexpr std::uint32_t kBlock = 64;
  for (std::uint32_t j0 = 0; j0 < m; j0 += kBlock) {
    const std::uint32_t n = std::min(kBlock, m - j0);
    if (count_exceeding(bits.data() + j0, keys + j0, n) == 0) continue;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (uniform_key(bits[j0 + i]) > keys[j0 + i]) on_hit(j0 + i);
    }
  }
}

}  // namespace cardsketch::detail
