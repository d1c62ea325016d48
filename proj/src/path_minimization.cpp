#include "pathprompt/path_minimization.hpp"

#include <set>

namespace pathprompt {

std::vector<ExecutionPath> minimize_paths(std::span<const ExecutionPath> paths) {
  std::set<Constraint> seen;
  bool unconditional_seen = false;
  std::vector<ExecutionPath> kept;
  for (const ExecutionPath& path : paths) {
    if (path.constraints.empty()) {
      if (!unconditional_seen) {
        unconditional_seen = true;
        kept.push_back(path);
      }
      continue;
    }
    bool novel = false;
    for (const Constraint& c : path.constraints) {
      if (!seen.contains(c)) {
        novel = true;
        break;
      }
    }
    if (!novel) continue;
    seen.insert(path.constraints.begin(), path.constraints.end());
    kept.push_back(path);
  }
  return kept;
}

}  // namespace pathprompt
