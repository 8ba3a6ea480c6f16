#pragma once

namespace trajent {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace trajent
