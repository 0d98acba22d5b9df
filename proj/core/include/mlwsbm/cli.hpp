#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mlwsbm {

/* Command line entry point (subcommands generate, fit, sweep, select,
 * score). Exit codes: 0 success, 1 usage error, 2 data error,
 * 3 numerical failure.
 */
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mlwsbm
