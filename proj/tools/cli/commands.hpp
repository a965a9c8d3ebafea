#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace readctl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Parses `args` (without the program name) and runs the subcommand.
/// `in` feeds `analyze` when no path is given. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace readctl::cli
