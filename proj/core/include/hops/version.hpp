#pragma once

namespace hops {

inline constexpr const char* kArtifactName = "hops-workbench";
inline constexpr const char* kArtifactVersion = "1.0.0";

}  // namespace hops
