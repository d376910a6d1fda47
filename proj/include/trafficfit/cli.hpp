#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace trafficfit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitTraceFailure = 1;
inline constexpr int kExitConfigError = 2;

/// Runs one command. `args` excludes the program name. Results go to files
/// named by --out or to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trafficfit::cli
