#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace maskcheck::cli {

/// Parses `args` (without the program name), runs the chosen subcommand and
/// writes its report to `out`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace maskcheck::cli
