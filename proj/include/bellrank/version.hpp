#pragma once

namespace bellrank {

inline constexpr const char* kArtifactVersion = "1.0.0";
inline constexpr const char* kReportSchemaVersion = "bellrank-report-v1";

}  // namespace bellrank
