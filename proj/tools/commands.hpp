#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace admmrate::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kUsageError = 2;

// Runs the admmrate command line with args (excluding the program name).
// Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace admmrate::cli
