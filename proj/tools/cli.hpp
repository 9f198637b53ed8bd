#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qms::cli {

/// Exit codes.
inline constexpr int kAffirmative = 0;
inline constexpr int kNegative = 1;
inline constexpr int kInconclusive = 2;
inline constexpr int kUsage = 3;

/// Runs one command line (without the program name). Reports go to `out`
/// as JSON, human-readable summaries to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qms::cli
