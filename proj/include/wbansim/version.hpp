#pragma once

namespace wbansim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace wbansim
