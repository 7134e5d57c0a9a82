#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace grtr::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitDivergence = 4;

/// Parses `args` (without the program name), runs one subcommand and returns
/// the process exit code. Reports go to --output when given, else to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace grtr::cli
