#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vecmerge::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kNumericError = 3,
};

/// Runs one command line. Results go to `out` (or to --out files), the
/// resolved configuration and progress lines to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Same as above; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vecmerge::cli
