#pragma once

#include <ostream>

namespace fmdp {

/// Exit codes shared by every subcommand.
enum ExitCode : int { ExitOk = 0, ExitUsage = 1, ExitDomain = 2 };

/**
 * Entry point of the `fmdp` tool: validate, eval, vi, pi, oracle, check.
 * Reports go to out, diagnostics to err.
 */
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace fmdp
