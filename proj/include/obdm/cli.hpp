#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace obdm {

/// Runs the `obdm` command line. Exit codes: 0 success or affirmative verdict,
/// 1 negative verdict, 2 usage or input error (diagnostic on `err`).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace obdm
