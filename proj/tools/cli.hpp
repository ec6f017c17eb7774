// cli.hpp: `sstp` command-line front end (simulate | compare | oracle)

#pragma once

#include <iosfwd>

namespace sstp::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kConfigError = 2,
    kAbortFraction = 3,
    kTruncation = 4,
};

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sstp::cli
