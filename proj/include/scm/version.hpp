#pragma once

namespace scm {

inline constexpr const char* kToolName = "scmsim";
inline constexpr const char* kVersion = "0.1.0";

} // namespace scm
