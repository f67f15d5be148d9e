#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace netabc::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kIo = 3,
    kLayout = 4,
    kEmptyPosterior = 5,
    kInvalid = 6,
    kVerifyMismatch = 7,
};

/// Runs one command line; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace netabc::cli
