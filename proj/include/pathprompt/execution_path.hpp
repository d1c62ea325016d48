#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

namespace pathprompt {

/// One branch condition on a path, kept as normalized source text.
struct Constraint {
  std::string expr;
  bool negated = false;

  Constraint() = default;
  /// Trims `source_expr` and flattens line breaks; throws Error{InvalidInput} if empty.
  explicit Constraint(std::string source_expr, bool is_negated = false);

  /// `expr`, or `not (expr)` when negated.
  std::string render() const;

  friend bool operator==(const Constraint&, const Constraint&) = default;
  friend auto operator<=>(const Constraint&, const Constraint&) = default;
};

/// Flips the negated flag. negate(negate(c)) == c.
Constraint negate(const Constraint& c);

enum class PathKind { Returning, ImplicitNone, Raising };

std::string_view to_string(PathKind kind);

/// An execution path: the conjunction of constraints that steers the focal
/// method along it, plus the behavior at its end once it is terminal.
struct ExecutionPath {
  std::vector<Constraint> constraints;
  std::optional<std::string> return_expr;
  PathKind kind = PathKind::ImplicitNone;

  bool terminal() const { return return_expr.has_value(); }
  /// True if some constraint appears together with its exact negation.
  bool contradictory() const;

  friend bool operator==(const ExecutionPath&, const ExecutionPath&) = default;
};

/// Active paths still being extended, and paths already ended by a
/// return/raise (or by falling off the end of the method).
struct PathSet {
  std::vector<ExecutionPath> active;
  std::vector<ExecutionPath> terminal;
};

}  // namespace pathprompt
