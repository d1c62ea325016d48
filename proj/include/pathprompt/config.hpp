#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pathprompt {

/// Pipeline settings read from a flat `key = value` file. Strings may be
/// quoted; `#` starts a comment; unknown keys are rejected.
struct Config {
  std::string backend = "replay";  // replay | http-chat | http-completion
  std::string endpoint;
  std::string replay_fixture;
  std::string model;
  std::string api_key_env = "OPENAI_API_KEY";
  std::size_t samples = 10;
  std::size_t max_paths = 16;
  std::size_t token_budget = 0;  // 0 = unlimited
  double temperature = 0.8;
  int max_tokens = 256;
  int template_version = 1;
  /// Disables extensions: raise statements are not turned into paths.
  bool strict_parity = false;
  double timeout = 10;         // per test, seconds
  double suite_timeout = 120;  // per suite, seconds
  std::string sandbox_command = "pathprompt-sandbox";
  std::string recorded_results;
  std::string repo_root;

  /// Throws Error{InvalidConfig} on out-of-range values.
  void validate() const;
};

Config parse_config(std::string_view text);
/// Relative replay_fixture, recorded_results and repo_root values resolve
/// against the directory of `path`.
Config load_config(const std::string& path);

/// Splits a command line on whitespace, honoring single and double quotes.
std::vector<std::string> split_command(std::string_view command);

}  // namespace pathprompt
