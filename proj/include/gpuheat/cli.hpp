#pragma once

#include <ostream>

namespace gpuheat::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kInvalidInput = 2,
  kNumericalAbort = 3,
};

/// Entry point of the `gpuheat` tool; returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gpuheat::cli
