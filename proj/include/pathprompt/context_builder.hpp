#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pathprompt/focal_method.hpp"
#include "pathprompt/syntax_tree.hpp"

namespace pathprompt {

enum class ContextPart {
  ImportsAndGlobals = 1,
  TypeContext = 2,
  FocalClassType = 3,
  FocalClassMethods = 4,
  FocalMethod = 5,
};

std::string_view to_string(ContextPart part);

/// A verbatim, line-aligned excerpt of the focal file.
struct Snippet {
  ContextPart part = ContextPart::ImportsAndGlobals;
  std::string label;  // defined name(s) or the import statement itself
  std::string text;   // == source.substr(span)
  Span span;
  std::uint32_t start_line = 0;
  std::uint32_t end_line = 0;
  bool is_import = false;
  std::vector<std::string> defines;  // module-level names bound by this snippet
};

/// Generation context in rendering order: imports/globals, type context,
/// focal class signature + constructor, called focal-class methods, focal method.
struct FocalContext {
  std::string module_name;
  std::vector<Snippet> imports_and_globals;
  std::vector<Snippet> type_context;
  std::vector<Snippet> focal_class_type;
  std::vector<Snippet> focal_class_methods;
  Snippet focal_method_def;
  /// Snippets removed to satisfy the token budget, in drop order.
  std::vector<Snippet> dropped;

  /// All retained snippets in part order 1..5.
  std::vector<const Snippet*> ordered() const;
  std::string render() const;
};

using TokenEstimator = std::function<std::size_t(std::string_view)>;

/// Default estimator: one token per four bytes, rounded up.
std::size_t estimate_tokens(std::string_view text);

/// Extracts the five-part context for `focal` from its file. A zero budget
/// means unlimited. Throws Error{BudgetExceeded} only when the focal method
/// alone exceeds the budget.
FocalContext build_generation_context(const SyntaxTree& file_tree, const FocalMethod& focal,
                                      std::size_t budget,
                                      const TokenEstimator& estimator = estimate_tokens);

/// Drops snippets until the rendered context fits: focal-class methods first
/// (last first), then type-context entries (largest first), then non-import
/// globals (last first). Imports, the focal class type and the focal method
/// are kept.
FocalContext fit_to_budget(FocalContext ctx, std::size_t budget,
                           const TokenEstimator& estimator = estimate_tokens);

/// Preamble that binds every object in the generation context for test
/// execution.
struct ExecutionContext {
  std::string preamble;
  std::vector<std::string> import_lines;  // one binding per line, sorted, unique
  std::vector<std::string> bound_names;   // sorted, unique

  bool binds(std::string_view name) const;
};

ExecutionContext build_execution_context(const FocalContext& ctx);

/// Removes model-written import statements whose bound names are all bound
/// by `exec_ctx` already. Only whole lines are removed; a removal that would
/// break parsing is skipped.
std::string strip_duplicate_imports(std::string_view test_code, const ExecutionContext& exec_ctx);

/// Names an import statement binds: "import a.b" -> "a.b",
/// "import a.b as c" -> "c", "from m import x as y" -> "y". Wildcards bind
/// nothing.
std::vector<std::string> import_bindings(Node import_stmt);

nlohmann::json to_json(const FocalContext& ctx);
nlohmann::json to_json(const ExecutionContext& ctx);

}  // namespace pathprompt
