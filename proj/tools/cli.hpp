#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace latdim::cli {

/// Parses `args` (without the program name) and runs the subcommand.
/// Returns 0 on success, 2 on usage errors, 1 on contract/range/resource errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace latdim::cli
