#pragma once

namespace dsinfer::cli {

inline constexpr const char* tool_name = "dsinfer";
inline constexpr const char* tool_version = "0.1.0";

}  // namespace dsinfer::cli
