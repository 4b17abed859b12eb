#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace msched::cli {

enum ExitCode : int {
  kOk = 0,
  kVerifyFailed = 1,
  kUsage = 2,
  kRefused = 3,  // budget or overflow guard
  kInternal = 4,
};

/// Runs one subcommand; args excludes the program name. Errors are reported
/// on err as a single JSON object {"error": ..., "kind": ...}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker count for fan-out: MSCHED_THREADS if set (>= 1), else hardware.
unsigned thread_cap();

}  // namespace msched::cli
