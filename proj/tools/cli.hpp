#pragma once

#include <string>
#include <vector>

namespace sohb::cli {

/// Entry point of the `sohb` binary. Exit codes: 0 success / all checks
/// pass, 1 validation failure, 2 usage/config error or no convergence,
/// 3 internal inconsistency.
int run(int argc, const char* const* argv);

/// Same, on pre-split arguments (without argv[0]); used by tests.
int run(const std::vector<std::string>& args);

}  // namespace sohb::cli
