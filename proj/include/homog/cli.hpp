#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace homog::cli {

enum ExitCode : int { ok = 0, validation_failure = 1, numerical_failure = 2 };

/// Runs the command line `args` (args[0] is the program name). Results go to
/// `out` (or the --output file), errors to `err` as one line of JSON.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace homog::cli
