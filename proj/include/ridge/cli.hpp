#pragma once
// Batch command-line front end: fit, path, cv, moments, simulate, bench.
// Exit codes: 0 success, 1 data or numerical error, 2 usage error.

#include <ostream>
#include <string>
#include <vector>

namespace ridge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

int run(int argc, char** argv, std::ostream& out, std::ostream& err);
// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ridge::cli
