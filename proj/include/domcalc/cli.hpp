#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace domcalc {

/// Runs the command line `args` (without the program name). Returns the
/// exit code: 0 success, 1 usage, input or parse error, 2 check or axiom
/// failure. Diagnostics use ANSI colour only when `color` is set.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool color = false);

}  // namespace domcalc
