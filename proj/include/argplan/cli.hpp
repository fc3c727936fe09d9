#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace argplan {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitEngine = 2;
inline constexpr int kExitProvider = 3;

/// Runs one command. `args` excludes the program name. Interactive selections
/// are read from `in`.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace argplan
