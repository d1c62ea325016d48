#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"
#include "pathprompt/execution_path.hpp"
#include "pathprompt/focal_method.hpp"

namespace pathprompt {

struct AnalysisOptions {
  /// Cap on terminal paths after minimization; 0 disables the cap.
  std::size_t max_paths = 16;
  /// Turn `raise` into terminal paths of kind Raising. When off, `raise`
  /// is traversed like any other statement.
  bool track_raises = true;
};

/// A construct the collector walks through without extracting constraints.
struct UnsupportedConstruct {
  std::string kind;  // e.g. "try_statement", "boolean_operator"
  std::uint32_t line = 0;
  std::string snippet;

  friend bool operator==(const UnsupportedConstruct&, const UnsupportedConstruct&) = default;
};

struct PathAnalysis {
  /// Terminal paths as collected (incremental minimization only).
  std::vector<ExecutionPath> collected;
  /// Final prompting set: minimized again and capped.
  std::vector<ExecutionPath> paths;
  std::vector<UnsupportedConstruct> unsupported;
  bool truncated = false;
  std::size_t max_paths = 0;
};

/// Preorder traversal of the focal method collecting approximate path
/// constraints. Throws Error{InvalidInput} if the focal definition contains
/// syntax errors.
PathAnalysis analyze_paths(const FocalMethod& focal, const AnalysisOptions& options = {});

/// Convenience: the final prompting path set of analyze_paths().
std::vector<ExecutionPath> collect_path_constraints(const FocalMethod& focal,
                                                    const AnalysisOptions& options = {});

nlohmann::json to_json(const ExecutionPath& path);
nlohmann::json to_json(const PathAnalysis& analysis);

}  // namespace pathprompt
