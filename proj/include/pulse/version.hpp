#pragma once

namespace pulse {

inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace pulse
