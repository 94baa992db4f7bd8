#pragma once

#include <iosfwd>

namespace contest::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kParseError = 2,
  kInvalidSpec = 3,
  kNoEquilibrium = 4,
  kVerificationFailed = 5,
};

/// Entry point of the contest-eq tool; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace contest::cli
