#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace slicegeo {

/// Command-line entry point; exposed as a function so tests can drive it.
/// Exit codes: 0 success, 1 usage/config errors, 2 domain errors,
/// 3 verification failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace slicegeo
