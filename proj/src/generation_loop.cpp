#include "pathprompt/generation_loop.hpp"

#include <algorithm>

#include "pathprompt/python_parser.hpp"

namespace pathprompt {

namespace {

bool defines_function(std::string_view code) {
  const SyntaxTree tree = parse_source(code);
  bool found = false;
  walk_preorder(tree.root(), [&](Node n) {
    if (n.is("function_definition")) found = true;
    return !found;
  });
  return found;
}

// Byte offsets just past each line's terminator (or at end of text).
std::vector<std::size_t> line_ends(std::string_view text) {
  std::vector<std::size_t> ends;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ends.push_back(pos);
  }
  return ends;
}

}  // namespace

std::size_t count_lines(std::string_view text) { return line_ends(text).size(); }

RepairResult repair_truncation(std::string_view header_plus_output) {
  const auto ends = line_ends(header_plus_output);
  for (std::size_t keep = ends.size(); keep > 0; --keep) {
    const std::string_view candidate = header_plus_output.substr(0, ends[keep - 1]);
    if (check_parses(candidate)) {
      if (!defines_function(candidate)) break;
      return {std::string(candidate), ends.size() - keep};
    }
  }
  return {std::string(), ends.size()};
}

std::string compose_chained_prompt(const std::string& rendered_context,
                                   const std::vector<std::string>& prior_tests,
                                   const std::string& prompt_text) {
  std::string out = rendered_context;
  auto add_block = [&](std::string_view block) {
    if (!out.empty()) {
      if (out.back() != '\n') out += '\n';
      out += "\n\n";
    }
    out += block;
  };
  for (const auto& t : prior_tests) add_block(t);
  add_block(prompt_text);
  return out;
}

std::string TestSuite::render_file() const {
  std::string out = execution_preamble.preamble;
  for (const GeneratedTest& t : tests) {
    if (t.empty()) continue;
    if (!out.empty()) out += "\n\n";
    out += t.final_code;
    if (!out.empty() && out.back() != '\n') out += '\n';
  }
  return out;
}

TestSuite generate_suite(const FocalMethod& focal, const FocalContext& ctx,
                         const std::vector<ExecutionPath>& paths, Strategy strategy,
                         Backend& backend, const GenerationConfig& cfg, std::size_t sample) {
  TestSuite suite;
  suite.focal = focal.qualified_name;
  suite.module_name = focal.module_name;
  suite.strategy = strategy;
  suite.sample = sample;
  suite.execution_preamble = build_execution_context(ctx);

  if (strategy == Strategy::NoOp) {
    GeneratedTest t;
    t.prompt = render_noop_prompt(focal);
    t.test_name = t.prompt.test_name;
    t.repaired_code = t.prompt.text;
    t.final_code = t.prompt.text;
    suite.tests.push_back(std::move(t));
    return suite;
  }

  const std::string full_context = ctx.render();
  std::vector<std::string> accepted;  // repaired tests eligible for chaining
  for (Prompt& prompt : build_prompts(strategy, focal, paths)) {
    GeneratedTest t;
    t.path_index = prompt.path_index;
    t.test_name = prompt.test_name;

    // Drop the earliest chained tests first, then shrink the context itself.
    std::string rendered_context = full_context;
    std::size_t first = 0;
    std::string request_text = compose_chained_prompt(rendered_context, accepted, prompt.text);
    if (cfg.token_budget != 0) {
      while (cfg.estimator(request_text) > cfg.token_budget && first < accepted.size()) {
        ++first;
        request_text = compose_chained_prompt(
            rendered_context, {accepted.begin() + static_cast<std::ptrdiff_t>(first), accepted.end()},
            prompt.text);
      }
      if (cfg.estimator(request_text) > cfg.token_budget) {
        const std::size_t overhead = cfg.estimator(compose_chained_prompt("", {}, prompt.text));
        const std::size_t room = cfg.token_budget > overhead + 1 ? cfg.token_budget - overhead - 1 : 1;
        rendered_context = fit_to_budget(ctx, room, cfg.estimator).render();
        request_text = compose_chained_prompt(rendered_context, {}, prompt.text);
      }
    }
    t.chained_tests = accepted.size() - first;

    CompletionRequest req;
    req.prompt_text = request_text;
    req.max_tokens = cfg.max_tokens;
    req.temperature = cfg.temperature;
    req.stop_sequences = cfg.stop_sequences;
    req.seed = static_cast<std::int64_t>(sample);
    t.request_sha256 = sha256_hex(request_text);
    t.raw_output = backend.complete(req);

    // The test header is the prompt's last line.
    const std::string& text = prompt.text;
    const std::size_t header_start = text.rfind('\n', text.size() - 2);
    const std::string header =
        header_start == std::string::npos ? text : text.substr(header_start + 1);
    RepairResult repaired = repair_truncation(header + t.raw_output);
    t.repaired_code = std::move(repaired.code);
    t.dropped_line_count = repaired.dropped_line_count;
    if (!t.repaired_code.empty()) {
      t.final_code = strip_duplicate_imports(t.repaired_code, suite.execution_preamble);
      accepted.push_back(t.repaired_code);
    }
    t.prompt = std::move(prompt);
    suite.tests.push_back(std::move(t));
  }
  return suite;
}

nlohmann::json to_json(const TestSuite& suite) {
  nlohmann::json tests = nlohmann::json::array();
  for (const GeneratedTest& t : suite.tests) {
    tests.push_back({
        {"test_name", t.test_name},
        {"path_index", t.path_index ? nlohmann::json(*t.path_index) : nlohmann::json()},
        {"prompt", to_json(t.prompt)},
        {"request_sha256", t.request_sha256},
        {"chained_tests", t.chained_tests},
        {"raw_output", t.raw_output},
        {"repaired_code", t.repaired_code},
        {"dropped_line_count", t.dropped_line_count},
        {"final_code", t.final_code},
        {"empty", t.empty()},
    });
  }
  return {{"focal", suite.focal},
          {"module", suite.module_name},
          {"strategy", to_string(suite.strategy)},
          {"sample", suite.sample},
          {"template_version", kTemplateVersion},
          {"execution_context", to_json(suite.execution_preamble)},
          {"tests", std::move(tests)}};
}

}  // namespace pathprompt
