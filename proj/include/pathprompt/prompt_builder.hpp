#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pathprompt/execution_path.hpp"
#include "pathprompt/focal_method.hpp"

namespace pathprompt {

/// Bumped whenever the rendered wording of any prompt changes.
inline constexpr int kTemplateVersion = 1;

enum class Strategy { PathPrompt, Baseline, NoOp };

/// CLI spelling: "symprompt", "baseline", "noop".
std::string_view to_string(Strategy s);
/// Throws Error{InvalidInput} for anything else.
Strategy parse_strategy(std::string_view name);

enum class PromptKind { Path, Baseline, NoOp };

std::string_view to_string(PromptKind k);

struct Prompt {
  PromptKind kind = PromptKind::Path;
  std::string text;
  std::optional<std::size_t> path_index;
  std::string focal;      // qualified name
  std::string test_name;  // function defined by the prompt header
};

/// Four-line path prompt: signature comment, `# where` constraint clause
/// (omitted when unconstrained), behavior clause (`# returns:` or
/// `# raises:`), test header.
Prompt render_path_prompt(const FocalMethod& focal, const ExecutionPath& path,
                          std::size_t path_index);

Prompt render_baseline_prompt(const FocalMethod& focal);

/// A complete test that only imports the focal module. Identical for every
/// focal method of one module.
std::string render_noop_test(std::string_view module_name);
Prompt render_noop_prompt(const FocalMethod& focal);

/// Prompts for `strategy`: one per path for PathPrompt, a single prompt
/// otherwise.
std::vector<Prompt> build_prompts(Strategy strategy, const FocalMethod& focal,
                                  const std::vector<ExecutionPath>& paths);

/// test_<method>_path_<i>, or test_<method> without an index.
std::string test_function_name(const FocalMethod& focal, std::optional<std::size_t> path_index);

/// {focal, kind, path_index, text, template_version}
nlohmann::json to_json(const Prompt& prompt);

}  // namespace pathprompt
