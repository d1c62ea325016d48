#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "pathprompt/syntax_tree.hpp"

namespace pathprompt {

/// A located method under test.
struct FocalMethod {
  std::string qualified_name;  // module.Class.method or module.function
  std::string module_name;
  std::string method_name;
  std::optional<std::string> enclosing_class;
  /// Def header as written, decorators included, through the trailing ':'.
  std::string signature;
  std::string source_file;
  SyntaxTree tree;
  Node body_root;   // the function_definition node
  Node definition;  // decorated_definition when decorated, else body_root

  /// Name used in prompts: "Class.method" or "function".
  std::string display_name() const;
  /// Parameter list plus return annotation on one line, e.g. "(path: _PATH) -> str".
  std::string signature_params() const;
  /// Byte span of the definition extended back to the start of its first line.
  Span line_aligned_span() const;
  std::uint32_t first_line() const { return definition.start_line(); }
  std::uint32_t last_line() const { return definition.end_line(); }
};

/// Module name derived from a path: "pkg/mod.py" -> "mod".
std::string module_name_from_path(std::string_view path);

/// Dotted module path relative to a repository root:
/// ("repo", "repo/pkg/sub/mod.py") -> "pkg.sub.mod".
std::string dotted_module_path(std::string_view repo_root, std::string_view file);

/// Resolves `qualified_name` against module-level functions and methods of
/// module-level classes. The leading module component is optional. Throws
/// Error{NotFound} or Error{Ambiguous}.
FocalMethod locate_focal_method(const SyntaxTree& tree, std::string_view qualified_name,
                                std::string_view source_file = {});

/// Unwraps a decorated_definition to the function or class it decorates.
Node unwrap_decorated(Node n);

}  // namespace pathprompt
