#pragma once

namespace flexent {

inline constexpr const char* kVersion = "1.0.0";

} // namespace flexent
