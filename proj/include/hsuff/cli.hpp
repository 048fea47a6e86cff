#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hsuff::cli {

/// Environment variable holding the default policy-enumeration cap.
inline constexpr const char* cap_env_var = "HSUFF_POLICY_CAP";

inline constexpr int exit_ok = 0;
inline constexpr int exit_failed_verification = 1;
inline constexpr int exit_usage = 2;

/// Runs one invocation (args excludes the program name). The JSON report
/// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hsuff::cli
