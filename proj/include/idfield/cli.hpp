#ifndef IDFIELD_CLI_HPP
#define IDFIELD_CLI_HPP

#include <string>
#include <vector>

namespace idfield::cli {

// Runs the command-line interface on argv-style arguments (without the
// program name). Returns the process exit code: 0 success, 1 validation or
// config error (machine-readable JSON on stderr), 2 when --expect
// contradicts the computed verdict.
int run(const std::vector<std::string>& args);

}  // namespace idfield::cli

#endif
