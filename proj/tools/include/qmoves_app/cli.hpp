#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qmoves::app {

/// Exit codes: 0 success, 1 unexpected failure, 2 usage/config/domain error,
/// 3 numeric or resource error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace qmoves::app
