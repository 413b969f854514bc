#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pwlip::cli {

/// Exit codes of the command-line front end.
enum ExitCode : int {
    kOk = 0,
    kError = 1,
    kLimitReached = 2,
    kGuardrail = 3,
    kUsage = 64,
    kBadInput = 65,
};

/// Runs `pwlip <subcommand> ...`; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pwlip::cli
