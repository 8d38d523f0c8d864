#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qfent {

// Exit codes shared by every command.
enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitUsage = 2,
  kExitConstruction = 3,
  kExitNumerical = 4,
};

// "8", "1,2,4", "1..1024:x2", "1..8", "10..100:+10"; result sorted, unique.
std::vector<long long> parse_n_spec(const std::string& spec);
// "0.1", "0.001..0.1:log20", "0..1:lin11", comma separated.
std::vector<double> parse_phi_spec(const std::string& spec);
// "1/13" or a plain real.
double parse_real_or_fraction(const std::string& text);

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qfent
