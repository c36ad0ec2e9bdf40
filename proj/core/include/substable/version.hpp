#pragma once

namespace substable {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace substable
