#include "pathprompt/pipeline.hpp"

#include <cctype>
#include <filesystem>
#include <map>
#include <sstream>

#include "pathprompt/batch.hpp"
#include "pathprompt/file_io.hpp"
#include "pathprompt/llm_client.hpp"
#include "pathprompt/python_parser.hpp"

namespace pathprompt {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json error_json(const ItemError& e) { return {{"code", to_string(e.code)}, {"message", e.message}}; }

json read_json(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, "'" + path + "' is not valid JSON: " + e.what());
  }
}

// The sandbox runs elsewhere, so jobs carry absolute paths.
std::string absolute_path(const std::string& p) {
  return p.empty() ? p : fs::absolute(p).lexically_normal().string();
}

}  // namespace

std::string FocalSpec::source_path() const {
  if (repo_root.empty() || fs::path(file).is_absolute()) return file;
  return (fs::path(repo_root) / file).string();
}

std::vector<FocalSpec> parse_manifest(std::string_view jsonl, const std::string& base_dir) {
  std::vector<FocalSpec> out;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      FocalSpec s;
      s.repo_root = j.value("repo_root", "");
      s.file = j.at("file").get<std::string>();
      s.qualified_name = j.at("qualified_name").get<std::string>();
      if (!base_dir.empty() && !fs::path(s.repo_root).is_absolute()) {
        s.repo_root = (fs::path(base_dir) / s.repo_root).lexically_normal().string();
      }
      out.push_back(std::move(s));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidInput, "manifest line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<FocalSpec> load_manifest(const std::string& path) {
  return parse_manifest(read_file(path), fs::path(path).parent_path().string());
}

AnalysisOptions analysis_options(const Config& cfg) {
  AnalysisOptions o;
  o.max_paths = cfg.max_paths;
  o.track_raises = !cfg.strict_parity;
  return o;
}

GenerationConfig generation_config(const Config& cfg) {
  GenerationConfig g;
  g.token_budget = cfg.token_budget;
  g.max_tokens = cfg.max_tokens;
  g.temperature = cfg.temperature;
  return g;
}

std::string focal_key(const FocalSpec& spec, std::string_view qualified_name) {
  std::string key;
  for (const char c : qualified_name) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
    key += ok ? c : '_';
  }
  // The file path disambiguates equal names from different files.
  return key + "-" + sha256_hex(spec.file + "\n" + std::string(qualified_name)).substr(0, 8);
}

PreparedFocal prepare_focal(const FocalSpec& spec, const Config& cfg) {
  PreparedFocal p;
  p.spec = spec;
  const std::string path = spec.source_path();
  const SyntaxTree tree = parse_source(read_file(path, ErrorCode::UnreadableSource));
  p.focal = locate_focal_method(tree, spec.qualified_name, path);
  if (!spec.repo_root.empty()) {
    p.focal.module_name = dotted_module_path(fs::absolute(spec.repo_root).lexically_normal().string(),
                                             fs::absolute(path).lexically_normal().string());
    p.focal.qualified_name = p.focal.module_name + "." + p.focal.display_name();
  }
  p.key = focal_key(spec, p.focal.qualified_name);
  p.analysis = analyze_paths(p.focal, analysis_options(cfg));
  p.context = build_generation_context(tree, p.focal, cfg.token_budget);
  p.context.module_name = p.focal.module_name;
  return p;
}

std::unique_ptr<Backend> make_backend(const Config& cfg) {
  if (cfg.backend == "replay") {
    if (cfg.replay_fixture.empty()) {
      throw Error(ErrorCode::InvalidConfig, "backend 'replay' needs replay_fixture");
    }
    return std::make_unique<ReplayBackend>(ReplayBackend::from_file(cfg.replay_fixture));
  }
  if (cfg.endpoint.empty()) throw Error(ErrorCode::InvalidConfig, "backend '" + cfg.backend + "' needs endpoint");
  HttpBackendConfig h;
  h.base_url = cfg.endpoint;
  h.model = cfg.model;
  h.api_key_env = cfg.api_key_env;
  h.chat = cfg.backend == "http-chat";
  return std::make_unique<HttpBackend>(h);
}

StageSummary generate_stage(const std::vector<FocalSpec>& specs, const Config& cfg,
                            const std::vector<Strategy>& strategies, const std::string& out_dir,
                            Backend& backend, int jobs, const ProgressFn& progress) {
  StageSummary summary;
  std::vector<std::optional<PreparedFocal>> prepared(specs.size());
  const auto prep_errors = run_indexed(specs.size(), jobs, [&](std::size_t i) {
    prepared[i] = prepare_focal(specs[i], cfg);
  });

  std::vector<GenerationJob> gen_jobs;
  for (const auto& p : prepared) {
    if (!p) continue;
    for (const Strategy s : strategies) {
      const std::size_t samples = s == Strategy::NoOp ? 1 : cfg.samples;
      for (std::size_t k = 0; k < samples; ++k) {
        gen_jobs.push_back({&p->focal, &p->context, &p->analysis.paths, s, k});
      }
    }
  }
  const GenerationConfig gcfg = generation_config(cfg);
  const auto outcomes = jobs > 1 ? generate_batch_parallel(gen_jobs, backend, gcfg, jobs)
                                 : generate_batch_serial(gen_jobs, backend, gcfg);

  std::map<const FocalMethod*, const PreparedFocal*> by_focal;
  for (const auto& p : prepared) {
    if (p) by_focal[&p->focal] = &*p;
  }

  json suites = json::array();
  json failures = json::array();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (!prep_errors[i]) continue;
    failures.push_back({{"qualified_name", specs[i].qualified_name},
                        {"file", specs[i].file},
                        {"stage", "prepare"},
                        {"error", error_json(*prep_errors[i])}});
    ++summary.failed;
    if (progress) progress("prepare " + specs[i].qualified_name + ": " + prep_errors[i]->message);
  }
  for (std::size_t i = 0; i < gen_jobs.size(); ++i) {
    const GenerationJob& job = gen_jobs[i];
    const PreparedFocal& p = *by_focal.at(job.focal);
    const std::string rel_dir = "suites/" + p.key + "/" + std::string(to_string(job.strategy));
    const std::string stem = rel_dir + "/sample_" + std::to_string(job.sample);
    if (outcomes[i].error) {
      failures.push_back({{"qualified_name", p.focal.qualified_name},
                          {"file", p.spec.file},
                          {"stage", "generate"},
                          {"strategy", to_string(job.strategy)},
                          {"sample", job.sample},
                          {"error", error_json(*outcomes[i].error)}});
      ++summary.failed;
      if (progress) progress("generate " + stem + ": " + outcomes[i].error->message);
      continue;
    }
    const TestSuite& suite = *outcomes[i].suite;
    write_file((fs::path(out_dir) / (stem + ".py")).string(), suite.render_file());
    write_file((fs::path(out_dir) / (stem + ".json")).string(), to_json(suite).dump(2) + "\n");
    json names = json::array();
    for (const GeneratedTest& t : suite.tests) names.push_back(t.test_name);
    suites.push_back({{"qualified_name", p.focal.qualified_name},
                      {"strategy", to_string(job.strategy)},
                      {"sample", job.sample},
                      {"suite_file", stem + ".py"},
                      {"sidecar", stem + ".json"},
                      {"test_names", std::move(names)},
                      {"repo_root", absolute_path(p.spec.repo_root)},
                      {"module_path", absolute_path(p.spec.source_path())},
                      {"module_name", p.focal.module_name},
                      {"first_line", p.focal.first_line()},
                      {"last_line", p.focal.last_line()}});
    ++summary.ok;
    if (progress) progress("generated " + stem + ".py");
  }
  const json index{{"template_version", kTemplateVersion},
                   {"protocol_version", kProtocolVersion},
                   {"suites", std::move(suites)},
                   {"failures", std::move(failures)}};
  write_file((fs::path(out_dir) / "manifest.json").string(), index.dump(2) + "\n");
  return summary;
}

StageSummary run_stage(const std::string& out_dir, const Config& cfg, SandboxRunner& runner, int jobs,
                       const ProgressFn& progress) {
  const json index = read_json((fs::path(out_dir) / "manifest.json").string());
  const json& suites = index.at("suites");
  std::vector<std::optional<SuiteExecution>> results(suites.size());
  const auto errors = run_indexed(suites.size(), jobs, [&](std::size_t i) {
    const json& s = suites[i];
    ExecutionJob job;
    job.suite_file = fs::absolute(fs::path(out_dir) / s.at("suite_file").get<std::string>()).string();
    job.repo_root = s.value("repo_root", "");
    job.focal.module_path = s.at("module_path").get<std::string>();
    job.focal.module_name = s.at("module_name").get<std::string>();
    job.focal.qualified_name = s.at("qualified_name").get<std::string>();
    job.focal.first_line = s.at("first_line").get<std::uint32_t>();
    job.focal.last_line = s.at("last_line").get<std::uint32_t>();
    job.timeout = cfg.timeout;
    job.suite_timeout = cfg.suite_timeout;
    results[i] = runner.run(job);
  });

  StageSummary summary;
  json entries = json::array();
  for (std::size_t i = 0; i < suites.size(); ++i) {
    const std::string suite_file = suites[i].at("suite_file").get<std::string>();
    if (errors[i]) {
      entries.push_back({{"suite_file", suite_file}, {"error", error_json(*errors[i])}});
      ++summary.failed;
      if (progress) progress("run " + suite_file + ": " + errors[i]->message);
    } else {
      entries.push_back({{"suite_file", suite_file}, {"result", to_json(*results[i])}});
      ++summary.ok;
      if (progress) progress("ran " + suite_file);
    }
  }
  const json out{{"protocol_version", kProtocolVersion}, {"executions", std::move(entries)}};
  write_file((fs::path(out_dir) / "executions.json").string(), out.dump(2) + "\n");
  return summary;
}

std::vector<SuiteOutcome> load_outcomes(const std::string& out_dir) {
  const json index = read_json((fs::path(out_dir) / "manifest.json").string());
  const json execs = read_json((fs::path(out_dir) / "executions.json").string());
  std::map<std::string, const json*> by_file;
  for (const json& e : execs.at("executions")) {
    if (e.contains("result")) by_file[e.at("suite_file").get<std::string>()] = &e.at("result");
  }
  std::vector<SuiteOutcome> out;
  for (const json& s : index.at("suites")) {
    const auto it = by_file.find(s.at("suite_file").get<std::string>());
    if (it == by_file.end()) continue;  // crashed or never run: excluded
    SuiteOutcome o;
    o.focal = s.at("qualified_name").get<std::string>();
    o.strategy = s.at("strategy").get<std::string>();
    o.sample = s.at("sample").get<std::size_t>();
    o.test_names = s.at("test_names").get<std::vector<std::string>>();
    o.execution = parse_suite_execution(*it->second);
    out.push_back(std::move(o));
  }
  return out;
}

MetricsReport report_stage(const std::string& out_dir) {
  const MetricsReport report = compute_metrics(load_outcomes(out_dir), true, kTemplateVersion);
  write_file((fs::path(out_dir) / "report.json").string(), to_json(report).dump(2) + "\n");
  write_file((fs::path(out_dir) / "report.txt").string(), render_table(report));
  return report;
}

}  // namespace pathprompt
