#pragma once

#include <ostream>

namespace notrade::cli {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
    kSuccess = 0,
    kNumericalFailure = 1,  // non-convergence, concavity loss, failed root bracket
    kUsageError = 2,        // bad flags, unreadable or invalid config, IO errors
};

/// Runs one subcommand (solve, asymptotics, sweep, simulate) and returns the
/// exit status. Diagnostics go to `err`, short summaries to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace notrade::cli
