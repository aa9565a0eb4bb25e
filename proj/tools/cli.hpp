#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lcpdl::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kSuccess = 0,
  kRuntimeFailure = 1,  // solver failure, unreadable model, dimension mismatch
  kUsageError = 2,      // bad flags or bad input data
};

/// Runs `lcpdl <subcommand> [flags]`; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lcpdl::cli
