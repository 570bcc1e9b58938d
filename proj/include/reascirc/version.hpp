#pragma once

#define REASCIRC_VERSION_STRING "0.1.0"

namespace reascirc {

inline const char* version() { return REASCIRC_VERSION_STRING; }

// Identifies the deterministic sampler so emitted files can be reproduced
// by the exact generator that made them.
inline const char* sampler_version() { return "splitmix64-fisheryates-v1"; }

}  // namespace reascirc
