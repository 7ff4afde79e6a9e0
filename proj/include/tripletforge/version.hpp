#pragma once

namespace tripletforge {

inline constexpr const char* kVersion = "0.3.0";

}  // namespace tripletforge
