#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace symdyn::cli {

enum ExitCode : int {
  kOk = 0,
  kVerificationFailed = 1,
  kParseError = 2,
  kPreconditionFailed = 3,
};

/// Runs the command line `symdyn <args...>` (args excludes the program
/// name) and returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace symdyn::cli
