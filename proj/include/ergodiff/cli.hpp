#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ergodiff {

enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitNumerical = 3 };

/// Entry point of the command-line tool; `args` excludes the program name.
/// Subcommands: simulate, classify, ergodic, order-check.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ergodiff
