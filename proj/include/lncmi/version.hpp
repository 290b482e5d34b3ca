#pragma once

namespace lncmi {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace lncmi
