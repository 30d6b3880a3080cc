#pragma once

namespace bwf {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace bwf
