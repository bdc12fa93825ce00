#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace semwm::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitIo = 3,
  kExitContract = 4,
};

/// Runs the command line `args` (args[0] is the program name) and returns the
/// process exit code. Nothing is written outside `out`, `err` and the files
/// named on the command line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// The `selftest` command delegates here. Returns true when every check
/// passed. Unset means selftest reports itself unavailable.
using SelftestRunner = std::function<bool(std::ostream&)>;
void set_selftest_runner(SelftestRunner runner);

}  // namespace semwm::cli
