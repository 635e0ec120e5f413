#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qcp {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,         // bad flags or a domain error in the inputs
  kExitVerification = 2,  // a verification suite or zero-error check failed
};

/// Runs the `qcp` command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qcp
