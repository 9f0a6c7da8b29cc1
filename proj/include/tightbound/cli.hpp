#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tightbound {

enum ExitCode : int {
  kExitOk = 0,
  kExitBudget = 1,
  kExitUsage = 2,
  kExitCheckFailed = 3,
};

/// Runs one command line (without the program name). `in` backs the `-`
/// path.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace tightbound
