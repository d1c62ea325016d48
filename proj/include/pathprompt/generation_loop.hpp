#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pathprompt/context_builder.hpp"
#include "pathprompt/execution_path.hpp"
#include "pathprompt/focal_method.hpp"
#include "pathprompt/llm_client.hpp"
#include "pathprompt/prompt_builder.hpp"

namespace pathprompt {

struct RepairResult {
  std::string code;
  std::size_t dropped_line_count = 0;
};

/// Deletes trailing lines until the text parses. Text without any function
/// definition left (e.g. a bare header) is reported as "" with every line
/// counted as dropped.
RepairResult repair_truncation(std::string_view header_plus_output);

/// Number of lines in `text`; a final unterminated line counts.
std::size_t count_lines(std::string_view text);

struct GeneratedTest {
  std::optional<std::size_t> path_index;
  Prompt prompt;
  std::string test_name;
  /// SHA-256 of the full chained prompt sent to the backend.
  std::string request_sha256;
  /// Number of earlier tests included in the chained prompt.
  std::size_t chained_tests = 0;
  std::string raw_output;
  /// Line-prefix of header + raw_output that parses, or "".
  std::string repaired_code;
  std::size_t dropped_line_count = 0;
  /// repaired_code with imports already bound by the preamble removed;
  /// this is what the suite file contains.
  std::string final_code;

  bool empty() const { return repaired_code.empty(); }
};

struct TestSuite {
  std::string focal;  // qualified name
  std::string module_name;
  Strategy strategy = Strategy::PathPrompt;
  std::size_t sample = 0;
  std::vector<GeneratedTest> tests;
  ExecutionContext execution_preamble;

  /// Preamble followed by every non-empty test, in path order.
  std::string render_file() const;
};

struct GenerationConfig {
  /// Upper bound on tokens of the chained prompt; 0 = unlimited.
  std::size_t token_budget = 0;
  int max_tokens = 256;
  double temperature = 0.8;
  std::vector<std::string> stop_sequences = default_stop_sequences();
  TokenEstimator estimator = estimate_tokens;
};

/// Full backend prompt: context, previously accepted tests, then the
/// current prompt, separated by blank lines.
std::string compose_chained_prompt(const std::string& rendered_context,
                                   const std::vector<std::string>& prior_tests,
                                   const std::string& prompt_text);

/// Runs the chained generation loop for one focal method and one sample.
/// The sample index is passed to the backend as the request seed. Backend
/// errors propagate and abort this suite only.
TestSuite generate_suite(const FocalMethod& focal, const FocalContext& ctx,
                         const std::vector<ExecutionPath>& paths, Strategy strategy,
                         Backend& backend, const GenerationConfig& cfg, std::size_t sample = 0);

/// Per-test metadata for the sidecar file.
nlohmann::json to_json(const TestSuite& suite);

}  // namespace pathprompt
