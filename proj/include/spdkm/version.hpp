#pragma once

namespace spdkm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace spdkm
