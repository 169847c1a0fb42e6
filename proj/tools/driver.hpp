#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace momentforge::cli {

/// Command-line entry point.  `args` excludes the program name.  Returns 0 when
/// every check passes, 1 when a check fails and 2 on configuration errors.
int run_command_line(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace momentforge::cli
