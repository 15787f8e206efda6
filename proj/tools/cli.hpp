#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace peerinfl::cli {

inline constexpr const char* kVersion = "0.1.0";

// Runs one subcommand. `args` excludes the program name. Returns the exit
// code; diagnostics go to `err`, summaries to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace peerinfl::cli
