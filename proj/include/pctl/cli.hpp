#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pctl::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kInvalid = 2,       // validation failure, infeasible target, bad arguments
  kNotConverged = 3,
  kIo = 4,
  kVerifyFailed = 5,
};

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace pctl::cli
