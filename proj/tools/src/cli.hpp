#pragma once

#include <iosfwd>

namespace skt::cli {

enum ExitCode : int { kSuccess = 0, kCheckFailed = 1, kUsageError = 2 };

/// Parses argv, runs one subcommand and writes its artifacts.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace skt::cli
