#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace harq::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kInfeasible = 3,
  kValidationFailure = 4,
};

/// Entry point of the `harq_aoi` tool. args excludes the program name.
/// Subcommands: optimize, sweep, curves, baseline, simulate.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace harq::cli
