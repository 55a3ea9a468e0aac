#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace amodal::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInternalError = 1;
inline constexpr int kInvalidInput = 2;

// Runs `amodal <args...>`; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace amodal::cli
