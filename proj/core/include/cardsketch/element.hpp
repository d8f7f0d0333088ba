#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace cardsketch {

/// One stream observation (i_t, d_t).
struct StreamElement {
  std::string item;
  std::int64_t d = 1;

  friend bool operator==(const StreamElement&, const StreamElement&) = default;
};

}  // namespace cardsketch
