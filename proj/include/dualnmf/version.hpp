#pragma once

namespace dualnmf {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dualnmf
