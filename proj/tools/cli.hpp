#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dsinfer::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_numeric = 2,
    exit_resource = 3,
};

/// Runs the command line `args` (without the program name). Reports go to
/// `out` unless --output names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dsinfer::cli
