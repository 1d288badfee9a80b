#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "mrsys/error.hpp"

namespace mrsys::cli {

// Exit statuses of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;  // also unparsable input files
inline constexpr int kExitNotInResolvent = 3;
inline constexpr int kExitUnstable = 4;
inline constexpr int kExitNotDivisor = 5;  // also BadTarget
inline constexpr int kExitDimensions = 6;  // dimension, shape and compatibility errors
inline constexpr int kExitNumerical = 7;   // singular solve or non-convergence

int exit_code_for(ErrorKind kind);

/// Run the tool on args (without the program name), writing to out and err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mrsys::cli
