#pragma once

namespace magres {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace magres
