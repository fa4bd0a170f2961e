#pragma once

namespace mutakill {

// Keep in sync with the CMake project version.
inline constexpr const char* kToolName = "mutakill";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

}  // namespace mutakill
