#pragma once

namespace aperiodic {

inline constexpr const char* kLibraryName = "aperiodic";
inline constexpr const char* kVersion = "0.1.0";

} // namespace aperiodic
