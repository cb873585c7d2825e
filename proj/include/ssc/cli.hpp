#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ssc {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitAcceptanceFailure = 2 };

/// Runs the `ssc` tool. args[0] is the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace ssc
