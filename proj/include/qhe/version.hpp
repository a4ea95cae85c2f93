#pragma once

namespace qhe {

inline constexpr const char* kVersion = "1.0.0";

} // namespace qhe
