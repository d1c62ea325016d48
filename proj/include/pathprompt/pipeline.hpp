#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pathprompt/config.hpp"
#include "pathprompt/context_builder.hpp"
#include "pathprompt/exec_protocol.hpp"
#include "pathprompt/generation_loop.hpp"
#include "pathprompt/metrics.hpp"
#include "pathprompt/path_analysis.hpp"

namespace pathprompt {

/// One benchmark manifest entry.
struct FocalSpec {
  std::string repo_root;
  std::string file;  // relative to repo_root unless absolute
  std::string qualified_name;

  std::string source_path() const;
};

/// JSONL of {repo_root, file, qualified_name}. Relative repo roots resolve
/// against `base_dir`.
std::vector<FocalSpec> parse_manifest(std::string_view jsonl, const std::string& base_dir = {});
std::vector<FocalSpec> load_manifest(const std::string& path);

/// A focal method with everything needed to prompt for it.
struct PreparedFocal {
  FocalSpec spec;
  std::string key;  // stable directory name
  FocalMethod focal;
  PathAnalysis analysis;
  FocalContext context;
};

AnalysisOptions analysis_options(const Config& cfg);
GenerationConfig generation_config(const Config& cfg);

/// Parses, locates, analyzes and builds the context. The module name is the
/// dotted path of the file below repo_root.
PreparedFocal prepare_focal(const FocalSpec& spec, const Config& cfg);

/// Filesystem-safe, content-derived name for a focal method.
std::string focal_key(const FocalSpec& spec, std::string_view qualified_name);

/// Backend selected by cfg.backend. Throws Error{InvalidConfig} when the
/// selected backend lacks its settings.
std::unique_ptr<Backend> make_backend(const Config& cfg);

using ProgressFn = std::function<void(const std::string&)>;

struct StageSummary {
  std::size_t ok = 0;
  std::size_t failed = 0;
};

/// Writes out_dir/suites/<key>/<strategy>/sample_<k>.py plus a .json
/// sidecar per suite and the index out_dir/manifest.json. A focal method
/// whose preparation or generation fails is recorded in the index with its
/// error and skipped.
StageSummary generate_stage(const std::vector<FocalSpec>& specs, const Config& cfg,
                            const std::vector<Strategy>& strategies, const std::string& out_dir,
                            Backend& backend, int jobs, const ProgressFn& progress = {});

/// Executes every generated suite listed in out_dir/manifest.json and writes
/// out_dir/executions.json.
StageSummary run_stage(const std::string& out_dir, const Config& cfg, SandboxRunner& runner, int jobs,
                       const ProgressFn& progress = {});

/// Suite outcomes joined from manifest.json and executions.json.
std::vector<SuiteOutcome> load_outcomes(const std::string& out_dir);

/// Computes the report and writes out_dir/report.json and report.txt.
MetricsReport report_stage(const std::string& out_dir);

}  // namespace pathprompt
