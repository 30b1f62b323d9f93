#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace asd {

/// Runs one command line (args[0] is the program name). Returns the process
/// exit code: 0 success, 1 validation, 2 I/O, 3 numeric failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace asd
