#pragma once

namespace resvort {
inline constexpr const char* kVersion = "0.1.0";
}
