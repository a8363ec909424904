#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace jsrcert::cli {

enum ExitCode : int {
  kOk = 0,
  kNone = 1,          // certificate absent / infeasible / invalid
  kUsage = 2,         // bad flags or malformed input
  kUndetermined = 3,  // solver could not decide
};

/// Runs one command line (without the program name). Results go to `out`
/// unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jsrcert::cli
