#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace moddiv::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kVerificationFailed = 1;
inline constexpr int kUsage = 2;
inline constexpr int kCapacity = 3;  // capacity, precision, incomplete factorization
inline constexpr int kNetwork = 4;   // fetch or parse failure

// Runs the command line `args` (without the program name). Data goes to
// `out`, diagnostics to `err`; returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace moddiv::cli
