#pragma once

namespace hqpulse {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hqpulse
