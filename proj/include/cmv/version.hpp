#pragma once

namespace cmv {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cmv
