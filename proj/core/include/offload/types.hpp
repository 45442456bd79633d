#pragma once

#include <cstdint>

namespace offload {

using NodeId = int;
using LinkId = int;
using TypeId = int;
using JobId = std::int64_t;

inline constexpr NodeId kNoNode = -1;

}  // namespace offload
