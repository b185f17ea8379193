#pragma once

namespace srq {

inline constexpr const char* kToolName = "srq";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace srq
