#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace harmtree {

/// Exit codes of run_cli.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. args excludes the program name. Reports go to out,
/// diagnostics to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace harmtree
