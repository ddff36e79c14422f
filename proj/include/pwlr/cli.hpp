#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pwlr::cli {

enum ExitCode : int { kSuccess = 0, kRuntimeFailure = 1, kUsage = 2 };

/// Entry point of the `pwlr` tool; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pwlr::cli
