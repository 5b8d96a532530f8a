#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cans::cli {

// Exit codes: 0 success, 1 numeric failure, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNumeric = 1;
inline constexpr int kExitUsage = 2;

// Full command-line entry point (subcommands: remez, schedule, orthogonalize,
// bench, verify, retract).  `argv[0]` is the program name.
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

// Convenience wrapper used by tests; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace cans::cli
