#pragma once

namespace turbmimo {
inline constexpr const char* kVersion = "1.0.0";
}
