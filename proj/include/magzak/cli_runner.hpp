#pragma once

#include <string>
#include <vector>

namespace magzak {

// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitPhysics = 2;

// Subcommands: simulate | converge | groundstate | verify-inequalities |
// split-data | thresholds. args excludes the program name.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, char** argv);

std::string version_string();

}  // namespace magzak
