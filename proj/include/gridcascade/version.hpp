#pragma once

namespace gridcascade {

inline constexpr const char* kToolName = "gridcascade";
inline constexpr const char* kVersion = "1.0.0";

} // namespace gridcascade
