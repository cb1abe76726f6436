#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sphcs::cli {

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNumerical = 3;

/// Runs the command line `args` (without the program name). Data go to `out`
/// unless --output names a file; diagnostics go to `err`.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace sphcs::cli
