#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scengen {

enum ExitCode : int { kExitOk = 0, kExitDiagnostics = 1, kExitUsage = 2, kExitQuit = 3 };

/// Runs one subcommand. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace scengen
