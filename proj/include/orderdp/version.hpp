#pragma once

namespace orderdp {

inline constexpr const char* version = "0.1.0";

} // namespace orderdp
