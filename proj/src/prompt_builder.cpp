#include "pathprompt/prompt_builder.hpp"

#include "pathprompt/errors.hpp"

namespace pathprompt {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::PathPrompt: return "symprompt";
    case Strategy::Baseline: return "baseline";
    case Strategy::NoOp: return "noop";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "symprompt") return Strategy::PathPrompt;
  if (name == "baseline") return Strategy::Baseline;
  if (name == "noop") return Strategy::NoOp;
  throw Error(ErrorCode::InvalidInput,
              "unknown strategy '" + std::string(name) + "' (expected symprompt, baseline or noop)");
}

std::string_view to_string(PromptKind k) {
  switch (k) {
    case PromptKind::Path: return "path";
    case PromptKind::Baseline: return "baseline";
    case PromptKind::NoOp: return "noop";
  }
  return "unknown";
}

std::string test_function_name(const FocalMethod& focal, std::optional<std::size_t> path_index) {
  std::string name = "test_" + focal.method_name;
  if (path_index) name += "_path_" + std::to_string(*path_index);
  return name;
}

Prompt render_path_prompt(const FocalMethod& focal, const ExecutionPath& path,
                          std::size_t path_index) {
  Prompt p;
  p.kind = PromptKind::Path;
  p.path_index = path_index;
  p.focal = focal.qualified_name;
  p.test_name = test_function_name(focal, path_index);

  p.text = "# Unit test for method " + focal.display_name() + focal.signature_params() + "\n";
  if (!path.constraints.empty()) {
    p.text += "# where ";
    for (std::size_t i = 0; i < path.constraints.size(); ++i) {
      if (i) p.text += " and ";
      p.text += path.constraints[i].render();
    }
    p.text += "\n";
  }
  const std::string behavior = path.return_expr.value_or("None");
  if (path.kind == PathKind::Raising) {
    p.text += "# " + behavior + "\n";  // already "raises: <exc>"
  } else {
    p.text += "# returns: " + behavior + "\n";
  }
  p.text += "def " + p.test_name + "():\n";
  return p;
}

Prompt render_baseline_prompt(const FocalMethod& focal) {
  Prompt p;
  p.kind = PromptKind::Baseline;
  p.focal = focal.qualified_name;
  p.test_name = test_function_name(focal, std::nullopt);
  p.text = "# Unit test for method " + focal.display_name() + "\ndef " + p.test_name + "():\n";
  return p;
}

std::string render_noop_test(std::string_view module_name) {
  return "def test_noop():\n    import " + std::string(module_name) + "\n    return\n";
}

Prompt render_noop_prompt(const FocalMethod& focal) {
  Prompt p;
  p.kind = PromptKind::NoOp;
  p.focal = focal.qualified_name;
  p.test_name = "test_noop";
  p.text = render_noop_test(focal.module_name);
  return p;
}

std::vector<Prompt> build_prompts(Strategy strategy, const FocalMethod& focal,
                                  const std::vector<ExecutionPath>& paths) {
  switch (strategy) {
    case Strategy::Baseline: return {render_baseline_prompt(focal)};
    case Strategy::NoOp: return {render_noop_prompt(focal)};
    case Strategy::PathPrompt: break;
  }
  std::vector<Prompt> out;
  out.reserve(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) out.push_back(render_path_prompt(focal, paths[i], i));
  return out;
}

nlohmann::json to_json(const Prompt& prompt) {
  return {{"focal", prompt.focal},
          {"kind", to_string(prompt.kind)},
          {"path_index", prompt.path_index ? nlohmann::json(*prompt.path_index) : nlohmann::json()},
          {"text", prompt.text},
          {"template_version", kTemplateVersion}};
}

}  // namespace pathprompt
