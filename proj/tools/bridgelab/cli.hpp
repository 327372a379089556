#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bridgelab::cli {

enum ExitCode : int {
  kOk = 0,
  kVerificationFailed = 1,
  kUsage = 2,
  kDomain = 3,
};

/// Runs the command line `args` (without the program name). Results go to
/// `out`, diagnostics and usage to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Parsers for the flag formats, exposed for tests.
std::vector<double> parse_vector(const std::string& text);
// Rows separated by ';', entries by ','.
std::vector<std::vector<double>> parse_matrix(const std::string& text);

}  // namespace bridgelab::cli
