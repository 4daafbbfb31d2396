#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sgrowth::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2, kIo = 3 };

/// Entry point of the `sgrowth` command. Results go to `out`, diagnostics
/// to `err`. Returns an ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Same, with the arguments after the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sgrowth::cli
