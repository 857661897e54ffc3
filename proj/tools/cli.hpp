#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ehsim::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    kOk = 0,
    kError = 1,          ///< bad flags, config or I/O
    kInfeasible = 2,     ///< plan: no feasible duty cycle
    kOverThreshold = 3,  ///< validate: energy deviation above --threshold
};

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ehsim::cli
