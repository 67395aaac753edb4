#pragma once

namespace radact {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kToolName = "radact";

// Propagation constant used for all range/Doppler conversions. The round
// 3e8 value keeps derived quantities (7.5 cm bins, 0.75-9.6 m swath) exact.
inline constexpr double kSpeedOfLight = 3.0e8;

} // namespace radact
