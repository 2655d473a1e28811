#pragma once

#include <iosfwd>

namespace qfdiv {

// Exit codes of the qdiv command line.
enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,  // verify found a failing check
  kExitDomain = 2,       // domain, argument or convergence error
  kExitParse = 3,        // malformed flags, files or specs
};

// Runs qdiv with the given arguments (argv[0] is the program name). Results
// go to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qfdiv
