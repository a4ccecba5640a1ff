#include <iostream>
#include <string>
#include <vector>

#include "mare/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  const mare::cli::CommandOutcome outcome = mare::cli::execute(args);
  if (!outcome.report_json.empty()) std::cout << outcome.report_json << '\n';
  if (!outcome.message.empty()) std::cerr << outcome.message << '\n';
  return outcome.exit_code;
}
