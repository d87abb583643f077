#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cogbench::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,   // unreadable or incomplete data files
  kConfigError = 2,  // scenario/config/usage errors
  kFactorIndex = 3,  // report axis beyond retained_I
  kInternal = 4,
};

// Entry point shared by the executable and the integration tests. args[0]
// is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cogbench::cli
