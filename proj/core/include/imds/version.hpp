#pragma once

namespace imds {

inline constexpr const char* kToolName = "imds-verify";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

}  // namespace imds
