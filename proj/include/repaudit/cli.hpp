#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace repaudit {

// Entry point of the `repaudit` tool. `args` includes the program name.
// Returns 0 on success, 2 for validation, 3 for I/O, 4 for numeric failures.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace repaudit
