#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace homer::cli {

enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kUsage = 2,
    kMismatch = 3,
};

/// Runs the `homer` command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace homer::cli
