#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pathprompt/errors.hpp"
#include "pathprompt/generation_loop.hpp"
#include "pathprompt/path_analysis.hpp"

namespace pathprompt {

/// Per-item failure captured by a batch kernel; other items are unaffected.
struct ItemError {
  ErrorCode code = ErrorCode::InvalidInput;
  std::string message;
};

/// Runs body(i) for i in [0, n). `threads` <= 1 runs serially in index
/// order; otherwise OpenMP distributes indices dynamically. Exceptions are
/// caught per index and returned in the slot of the failing item.
template <typename Body>
std::vector<std::optional<ItemError>> run_indexed(std::size_t n, int threads, Body&& body);

struct AnalysisJob {
  std::string file;  // used for module naming and diagnostics
  std::string source;
  std::string qualified_name;
};

struct AnalysisOutcome {
  std::optional<PathAnalysis> analysis;
  std::optional<ItemError> error;
};

/// Reference implementation: one item after another.
std::vector<AnalysisOutcome> analyze_batch_serial(const std::vector<AnalysisJob>& jobs,
                                                  const AnalysisOptions& options);
/// Same results as the serial kernel, items spread over `threads` workers.
std::vector<AnalysisOutcome> analyze_batch_parallel(const std::vector<AnalysisJob>& jobs,
                                                    const AnalysisOptions& options, int threads);

struct GenerationJob {
  const FocalMethod* focal = nullptr;
  const FocalContext* context = nullptr;
  const std::vector<ExecutionPath>* paths = nullptr;
  Strategy strategy = Strategy::PathPrompt;
  std::size_t sample = 0;
};

struct GenerationOutcome {
  std::optional<TestSuite> suite;
  std::optional<ItemError> error;
};

/// Jobs of one focal method always run sequentially in job order; distinct
/// focal methods run concurrently in the parallel kernel. `backend` must be
/// safe for concurrent complete() calls when threads > 1.
std::vector<GenerationOutcome> generate_batch_serial(const std::vector<GenerationJob>& jobs,
                                                     Backend& backend, const GenerationConfig& cfg);
std::vector<GenerationOutcome> generate_batch_parallel(const std::vector<GenerationJob>& jobs,
                                                       Backend& backend, const GenerationConfig& cfg,
                                                       int threads);

}  // namespace pathprompt

#include "pathprompt/batch_impl.hpp"
