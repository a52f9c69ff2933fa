#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lexinduce::cli {

// Runs one subcommand; `args` excludes the program name. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lexinduce::cli
