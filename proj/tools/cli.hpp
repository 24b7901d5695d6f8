#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace genparse::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2 };

// Runs the command line `args` (args[0] is the program name). Normal output
// goes to `out`, messages to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "0.3", "8/26" -> value. Throws std::invalid_argument.
double parse_fraction(const std::string& text);

// Beam-size expression relative to k: "k", "k/10", or a literal integer.
// Division rounds down. Throws std::invalid_argument.
int resolve_beam(const std::string& expr, int k);

struct GridPoint {
  std::string search;
  int k = 0;
  std::string k_w;
  std::string k_s;
  std::string p;
};

// Cartesian product in the order search, k, k_w, k_s, p (last varies fastest).
std::vector<GridPoint> expand_grid(const std::vector<std::string>& search, const std::vector<int>& k,
                                   const std::vector<std::string>& k_w,
                                   const std::vector<std::string>& k_s,
                                   const std::vector<std::string>& p);

}  // namespace genparse::cli
