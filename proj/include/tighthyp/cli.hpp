#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tighthyp::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNone = 2, kBudget = 3, kStageFailure = 4 };

/// Entry point of the `tighthyp` binary. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tighthyp::cli
