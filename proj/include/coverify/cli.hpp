// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace coverify {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitVerificationFailed = 1,
    kExitConfigError = 2,
    kExitEngineError = 3,
    kExitCalibrationError = 4,
};

/// Entry point of the `coverify` tool. `args` includes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace coverify
