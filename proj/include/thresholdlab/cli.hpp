#pragma once

/// @file cli.hpp
/// Command dispatch behind the thresholdlab executable. Kept free of argv
/// handling so tests can drive it directly.

#include <map>
#include <string>
#include <vector>

namespace thresholdlab::cli {

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitCheckFailed = 2;

struct CommandSpec {
  std::string command;  // eval curve threshold width verify construct scaling mc
  std::string expr_text;
  std::map<std::string, std::string> options;  // flag name without dashes
};

struct CommandResult {
  int exit_code;
  std::string output;  // stdout payload
  std::string error;   // diagnostic for stderr
};

CommandResult run(const CommandSpec& spec);

/// Commands and the flags each accepts (without dashes). "json" is a
/// switch; its value is ignored.
const std::map<std::string, std::vector<std::string>>& command_flags();

/// Locale-independent shortest round-trip formatting; "nan"/"inf" for
/// non-finite values.
std::string format_number(double x);

}  // namespace thresholdlab::cli
