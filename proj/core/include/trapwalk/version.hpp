#pragma once

namespace trapwalk {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kBuildId = "trapwalk-0.1.0";

}  // namespace trapwalk
