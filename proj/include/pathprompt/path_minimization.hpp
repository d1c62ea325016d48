#pragma once

#include <span>
#include <vector>

#include "pathprompt/execution_path.hpp"

namespace pathprompt {

/// Keeps, in input order, each path that carries at least one constraint not
/// seen on an earlier kept path. The union of constraints is preserved, and
/// for k sequential two-way branches the result has k + 1 paths.
///
/// A path with no constraints at all is treated as carrying the single
/// unconditional constraint: the first such path is kept, later ones are not.
std::vector<ExecutionPath> minimize_paths(std::span<const ExecutionPath> paths);

}  // namespace pathprompt
