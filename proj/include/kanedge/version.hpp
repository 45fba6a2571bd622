#pragma once

namespace kanedge {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace kanedge
