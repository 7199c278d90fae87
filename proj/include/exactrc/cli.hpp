#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace exactrc::cli {

/// Runs the command line (args exclude the program name). Returns 0 on
/// success, 1 on a command error and 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace exactrc::cli
