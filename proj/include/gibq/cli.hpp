#pragma once

namespace gibq {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kManifestSchemaVersion = "gibq.manifest/1";

/// Entry point of the `gibq` tool. Exit codes: 0 success, 1 computational
/// failure (or a failed check in verify-all), 2 configuration error.
int run_cli(int argc, char** argv);

}  // namespace gibq
