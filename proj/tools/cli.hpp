#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ddsim::cli {

// Exit statuses.
constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;
constexpr int kVerifyFailed = 3;

// Runs one command line; args excludes the program name. Normal output goes
// to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ddsim::cli
