#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace factorgroup {

/// Command-line entry point. `args` excludes the program name.
/// Returns 0 on success, 1 on a usage error, 2 on a computation error.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, const char* const* argv);

}  // namespace factorgroup
