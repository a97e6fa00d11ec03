#pragma once

namespace tips {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace tips
