#pragma once

#include <cstdint>

namespace dynppr {

using NodeId = std::uint32_t;

inline constexpr NodeId kInvalidNode = ~NodeId{0};

}  // namespace dynppr
