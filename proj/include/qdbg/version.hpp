#pragma once

namespace qdbg {

inline constexpr const char* kVersion = "0.1.0";

} // namespace qdbg
