#pragma once

#include <string>
#include <vector>

namespace swarmlab {

// Entry point behind main(). args excludes the program name.
// Exit codes: 0 success, 1 validation or usage error, 2 runtime error,
// 3 reference-tolerance failure (preset mode with --check).
int run_cli(std::vector<std::string> args);

}  // namespace swarmlab
