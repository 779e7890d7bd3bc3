#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nmfcheck/errors.hpp"

namespace nmfcheck::cli {

// Stable process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitIo = 3,
  kExitShape = 4,     // shape and bounds errors
  kExitDomain = 5,    // domain, degenerate-input and ingestion errors
  kExitNumerical = 6,
};

int exit_code_for(ErrorKind kind);

/// Parses `args` (args[0] is the program name), runs the subcommand, and
/// returns the exit status. Reports go to `out`, diagnostics to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace nmfcheck::cli
