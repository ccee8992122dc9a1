#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace coalesce::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitDomain = 3;

/// Runs one invocation; args excludes the program name. Results go to out
/// (or to --output), diagnostics to err. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace coalesce::cli
