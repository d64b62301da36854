// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

namespace wtflow::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitData = 2,
    kExitNumerical = 3,
};

/// Environment variable that, when set to an unsigned integer, replaces every seed.
inline constexpr const char* kSeedEnv = "WTFLOW_SEED";

/// Runs one command line in-process. `out` receives the one-line JSON summary,
/// `err` diagnostics and progress lines.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace wtflow::cli
