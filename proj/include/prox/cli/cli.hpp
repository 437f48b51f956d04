#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace prox::cli {

/// Exit statuses of the `prox` command.
enum ExitStatus : int {
    kOk = 0,
    /// Diagnostics, property violation, deadlock or a run that did not complete.
    kFindings = 1,
    /// Usage, parse and IO errors.
    kFailure = 2,
};

/// Runs one invocation. `args` excludes the program name. ANSI color is used
/// only when `terminal` is set and PROX_COLOR is not "0".
int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool terminal = false);

}  // namespace prox::cli
