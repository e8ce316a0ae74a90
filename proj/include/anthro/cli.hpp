#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace anthro {

/// Runs one subcommand. `args` excludes the program name. Returns 0 on
/// success, 1 on a usage error (after printing the subcommand's help to
/// `err`), 2 on a data error. Logs are JSON lines on `err`.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace anthro
