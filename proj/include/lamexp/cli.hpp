#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lamexp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitUsage = 2;

// Parses argv (argv[0] is the program name), runs the subcommand and writes
// its table to `out` or to the --output file. Diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Same, with the arguments after the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lamexp::cli
