#pragma once

namespace etcl {

inline constexpr const char* kVersion = "etcl 0.1.0";
inline constexpr int kSchemaVersion = 1;

}  // namespace etcl
