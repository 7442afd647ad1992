#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uncertain_eval::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;

/// Runs the command line (without the program name). JSON results go to
/// `out`, diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace uncertain_eval::cli
