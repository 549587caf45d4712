#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sibyl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

// Runs one subcommand. args excludes the program name. Returns 0 on success,
// 1 on data or validation failure, 2 on usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sibyl::cli
