#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace smlmc::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kDataError = 3,
    kExcludedRegime = 4,
};

/// Runs the command line (args excludes the program name) and returns the
/// process exit code. Nothing is written to disk before flags validate.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace smlmc::cli
