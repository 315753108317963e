#pragma once

#include <iosfwd>

namespace mopc::cli {

// Exit codes: 0 success, 1 usage or validation error, 2 I/O error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitIo = 2;

// Parses argv, runs one subcommand (trim, find-path, stability, pool-sim,
// session-sim) and returns the exit code. CSV goes to `out` unless -o is
// given; diagnostics go to `err`.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mopc::cli
