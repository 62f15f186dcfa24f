#pragma once

#include <string>
#include <vector>

namespace vpc {

/// Entry point shared by the binary and the tests. `args` excludes the
/// program name. Returns the process exit code: 0 success, 2 usage/config
/// error, 3 data error, 4 internal error.
int run_cli(const std::vector<std::string>& args);

}  // namespace vpc
