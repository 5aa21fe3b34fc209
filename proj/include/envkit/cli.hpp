#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace envkit {

/// Entry point of the envkit command-line tool. Exit codes: 0 success,
/// 1 usage or validation error, 2 solver hit max_iter.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace envkit
