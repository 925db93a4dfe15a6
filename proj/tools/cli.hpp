#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bellsig::cli {

enum ExitCode : int {
  kSuccess = 0,
  kIoFailure = 1,
  kUsage = 2,
  kValidation = 3,
  kNonConvergence = 4,
};

// Runs one subcommand. args excludes the program name. Machine-readable
// output goes to `out` only when no --out path is given; progress and
// errors go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bellsig::cli
