#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pathprompt {

/// Runs the command line `args` (args[0] is the program name). Returns the
/// process exit code: 0 ok, 1 internal error, 2 user input error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pathprompt
