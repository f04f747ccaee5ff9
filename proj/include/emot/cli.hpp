#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace emot {

// Exit codes: 0 converged / all checks passed, 2 not converged or stagnated,
// 1 usage, parse or IO error.
int cli_main(int argc, const char* const* argv);
// args excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace emot
