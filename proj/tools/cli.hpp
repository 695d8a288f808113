#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace beccert {

/// Exit codes: 0 success, 1 certification or assertion failure, 2 usage error.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

/// Runs the command line `args` (without the program name), writing results
/// to `out` and diagnostics and progress to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace beccert
