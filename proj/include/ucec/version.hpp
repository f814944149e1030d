#pragma once

namespace ucec {
inline constexpr const char* kVersion = "0.1.0";
}
