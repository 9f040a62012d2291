#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace horae::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNegative = 1;  // an Inconsistent verdict
inline constexpr int kExitUsage = 2;     // bad flags or unreadable input

/// Runs one subcommand. `args` excludes the program name. Results go to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace horae::cli
