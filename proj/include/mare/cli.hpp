#pragma once

#include <optional>
#include <string>
#include <vector>

namespace mare::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kBreakdown = 3 };

struct CommandOutcome {
  int exit_code = kOk;
  std::string report_json;
  std::optional<std::string> trace_csv;  // path written, if any
  std::string message;                   // diagnostic for stderr
};

/// Runs one command. `args` excludes the program name, e.g.
/// {"solve", "prob.json", "--method", "adda"}.
CommandOutcome execute(const std::vector<std::string>& args);

}  // namespace mare::cli
