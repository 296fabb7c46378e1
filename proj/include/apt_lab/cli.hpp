#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace apt_lab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInconclusive = 1;
inline constexpr int kExitUsage = 2;

/// `args` excludes the program name. JSON/DOT/text goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace apt_lab::cli
