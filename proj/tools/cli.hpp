#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace eqlms_cli {

// Stable process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitConfig = 3,
  kExitDivergence = 4,
  kExitIo = 5,
};

struct CliInvocation {
  std::string command;  // run | suite | compare | estimate-lambda
  std::optional<std::string> config_path;
  std::vector<std::pair<std::string, nlohmann::json>> overrides;  // --set key=value
  nlohmann::json flags = nlohmann::json::object();                // explicit flags, config-key form
  std::string output_dir = "results";
  bool full_scale = false;

  // estimate-lambda only
  std::size_t samples = 100000;
  std::size_t taps = 5;
  std::uint64_t seed = 1;
  double variance = 1.0;
  std::optional<std::string> input_path;
  std::optional<std::string> dump_path;
};

struct ParseResult {
  std::optional<CliInvocation> invocation;  // empty when parsing stopped
  int exit_code = kExitOk;                  // meaningful when invocation is empty
  std::string output;                       // help or usage text
};

// argv[0] is the program name.
ParseResult parse_invocation(const std::vector<std::string>& argv);

// Config-file contents, then --set overrides, then explicit flags.
nlohmann::json merged_config(const CliInvocation& inv);

int execute(const CliInvocation& inv, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace eqlms_cli
