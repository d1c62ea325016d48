#include "cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "pathprompt/batch.hpp"
#include "pathprompt/config.hpp"
#include "pathprompt/context_builder.hpp"
#include "pathprompt/errors.hpp"
#include "pathprompt/file_io.hpp"
#include "pathprompt/path_analysis.hpp"
#include "pathprompt/pipeline.hpp"
#include "pathprompt/prompt_builder.hpp"
#include "pathprompt/python_parser.hpp"

namespace pathprompt {

namespace {

constexpr int kOk = 0;
constexpr int kInternal = 1;
constexpr int kUser = 2;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnreadableSource:
    case ErrorCode::NotFound:
    case ErrorCode::Ambiguous:
    case ErrorCode::BudgetExceeded:
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidInput:
    case ErrorCode::ReplayMiss:
      return kUser;
    case ErrorCode::BackendUnavailable:
    case ErrorCode::SandboxCrash:
    case ErrorCode::ProtocolError:
      return kInternal;
  }
  return kInternal;
}

struct Options {
  std::string config_path;
  std::string file;
  std::string qualified_name;
  std::string manifest;
  std::string out_dir;
  std::vector<std::string> strategies;
  std::optional<std::size_t> max_paths;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> budget;
  std::string sandbox;
  std::string recorded_results;
  std::string repo_root;
  bool strict = false;
  int jobs = 1;
};

Config effective_config(const Options& o) {
  Config cfg = o.config_path.empty() ? Config{} : load_config(o.config_path);
  if (o.max_paths) cfg.max_paths = *o.max_paths;
  if (o.samples) cfg.samples = *o.samples;
  if (o.budget) cfg.token_budget = *o.budget;
  if (o.strict) cfg.strict_parity = true;
  if (!o.sandbox.empty()) cfg.sandbox_command = o.sandbox;
  if (!o.recorded_results.empty()) cfg.recorded_results = o.recorded_results;
  if (!o.repo_root.empty()) cfg.repo_root = o.repo_root;
  cfg.validate();
  return cfg;
}

std::vector<Strategy> strategies_of(const Options& o) {
  std::vector<Strategy> out;
  for (const auto& s : o.strategies) out.push_back(parse_strategy(s));
  if (out.empty()) out = {Strategy::PathPrompt, Strategy::Baseline, Strategy::NoOp};
  return out;
}

std::vector<FocalSpec> specs_of(const Options& o, const Config& cfg) {
  if (!o.manifest.empty()) return load_manifest(o.manifest);
  if (o.file.empty() || o.qualified_name.empty()) {
    throw Error(ErrorCode::InvalidInput, "give either --manifest or FILE QUALIFIED_NAME");
  }
  return {FocalSpec{cfg.repo_root, std::filesystem::absolute(o.file).string(), o.qualified_name}};
}

int cmd_analyze(const Options& o, std::ostream& out) {
  const Config cfg = effective_config(o);
  const SyntaxTree tree = parse_source(read_file(o.file, ErrorCode::UnreadableSource));
  const FocalMethod focal = locate_focal_method(tree, o.qualified_name, o.file);
  nlohmann::json j = to_json(analyze_paths(focal, analysis_options(cfg)));
  j["focal"] = focal.qualified_name;
  out << j.dump(2) << "\n";
  return kOk;
}

int cmd_context(const Options& o, std::ostream& out) {
  const Config cfg = effective_config(o);
  const PreparedFocal p = prepare_focal(specs_of(o, cfg).front(), cfg);
  out << nlohmann::json{{"generation_context", to_json(p.context)},
                        {"rendered", p.context.render()},
                        {"execution_context", to_json(build_execution_context(p.context))}}
             .dump(2)
      << "\n";
  return kOk;
}

int cmd_prompts(const Options& o, std::ostream& out, std::ostream& err) {
  const Config cfg = effective_config(o);
  int rc = kOk;
  for (const FocalSpec& spec : specs_of(o, cfg)) {
    try {
      const PreparedFocal p = prepare_focal(spec, cfg);
      for (const Strategy s : strategies_of(o)) {
        for (const Prompt& prompt : build_prompts(s, p.focal, p.analysis.paths)) {
          out << to_json(prompt).dump() << "\n";
        }
      }
    } catch (const Error& e) {
      err << "error: " << spec.qualified_name << ": " << e.what() << "\n";
      rc = std::max(rc, exit_code_for(e.code()));
    }
  }
  return rc;
}

int cmd_generate(const Options& o, std::ostream& out, std::ostream& err) {
  const Config cfg = effective_config(o);
  const auto specs = specs_of(o, cfg);
  const auto backend = make_backend(cfg);
  const StageSummary s = generate_stage(specs, cfg, strategies_of(o), o.out_dir, *backend, o.jobs,
                                        [&](const std::string& line) { err << line << "\n"; });
  out << "generated " << s.ok << " suites, " << s.failed << " failures -> "
      << (std::filesystem::path(o.out_dir) / "manifest.json").string() << "\n";
  return s.ok == 0 && s.failed > 0 ? kInternal : kOk;
}

int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
  const Config cfg = effective_config(o);
  std::unique_ptr<SandboxRunner> runner;
  if (!cfg.recorded_results.empty()) {
    runner = std::make_unique<RecordedSandbox>(RecordedSandbox::from_file(cfg.recorded_results));
  } else {
    runner = std::make_unique<ProcessSandbox>(split_command(cfg.sandbox_command));
  }
  const StageSummary s = run_stage(o.out_dir, cfg, *runner, o.jobs,
                                   [&](const std::string& line) { err << line << "\n"; });
  out << "executed " << s.ok << " suites, " << s.failed << " failures -> "
      << (std::filesystem::path(o.out_dir) / "executions.json").string() << "\n";
  return s.ok == 0 && s.failed > 0 ? kInternal : kOk;
}

int cmd_report(const Options& o, std::ostream& out) {
  const MetricsReport report = report_stage(o.out_dir);
  out << render_table(report);
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Path-constraint prompting for Python unit test generation"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "Config file (key = value)")->check(CLI::ExistingFile);
    sub->add_option("--max-paths", o.max_paths, "Cap on prompted paths (0 = unlimited)");
    sub->add_flag("--strict", o.strict, "Strict mode: raise statements do not end paths");
    sub->add_option("--repo-root", o.repo_root, "Repository root for dotted module names");
  };
  auto add_target = [&](CLI::App* sub, bool required) {
    auto* f = sub->add_option("file", o.file, "Python source file");
    auto* q = sub->add_option("qualified_name", o.qualified_name, "[module.][Class.]method");
    if (required) {
      f->required();
      q->required();
    }
  };
  auto add_strategy = [&](CLI::App* sub) {
    sub->add_option("--strategy", o.strategies, "symprompt, baseline or noop (repeatable)")
        ->check(CLI::IsMember({"symprompt", "baseline", "noop"}));
  };

  auto* analyze = app.add_subcommand("analyze", "Print collected and minimized paths as JSON");
  add_common(analyze);
  add_target(analyze, true);

  auto* context = app.add_subcommand("context", "Print the generation and execution context as JSON");
  add_common(context);
  add_target(context, true);
  context->add_option("--budget", o.budget, "Context token budget (0 = unlimited)");

  auto* prompts = app.add_subcommand("prompts", "Print prompts as JSONL");
  add_common(prompts);
  add_target(prompts, false);
  add_strategy(prompts);
  prompts->add_option("--manifest", o.manifest, "JSONL of {repo_root, file, qualified_name}");

  auto* generate = app.add_subcommand("generate", "Generate test suites");
  add_common(generate);
  add_target(generate, false);
  add_strategy(generate);
  generate->add_option("--manifest", o.manifest, "JSONL of {repo_root, file, qualified_name}");
  generate->add_option("--out", o.out_dir, "Output directory")->required();
  generate->add_option("--samples", o.samples, "Suites per focal method and strategy");
  generate->add_option("--jobs", o.jobs, "Focal methods generated concurrently")->check(CLI::PositiveNumber);

  auto* run = app.add_subcommand("run", "Execute generated suites through the sandbox protocol");
  add_common(run);
  run->add_option("--out", o.out_dir, "Output directory of a generate run")->required();
  run->add_option("--sandbox", o.sandbox, "Sandbox command line");
  run->add_option("--recorded-results", o.recorded_results, "JSONL of recorded executions");
  run->add_option("--jobs", o.jobs, "Suites executed concurrently")->check(CLI::PositiveNumber);

  auto* report = app.add_subcommand("report", "Compute metrics from executed suites");
  report->add_option("--out", o.out_dir, "Output directory of a run")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUser;
  }

  try {
    if (*analyze) return cmd_analyze(o, out);
    if (*context) return cmd_context(o, out);
    if (*prompts) return cmd_prompts(o, out, err);
    if (*generate) return cmd_generate(o, out, err);
    if (*run) return cmd_run(o, out, err);
    if (*report) return cmd_report(o, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}

}  // namespace pathprompt
