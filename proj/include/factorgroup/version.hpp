#pragma once

namespace factorgroup {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace factorgroup
