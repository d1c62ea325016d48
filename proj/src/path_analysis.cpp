#include "pathprompt/path_analysis.hpp"

#include <algorithm>

#include "pathprompt/errors.hpp"
#include "pathprompt/path_minimization.hpp"
#include "pathprompt/python_lexer.hpp"

namespace pathprompt {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

bool is_nested_scope(Node n) {
  return n.is("function_definition") || n.is("class_definition") ||
         n.is("decorated_definition") || n.is("lambda");
}

class PathCollector {
 public:
  PathCollector(const FocalMethod& focal, const AnalysisOptions& options)
      : focal_(focal), options_(options) {}

  std::vector<ExecutionPath> run() {
    std::vector<ExecutionPath> active(1);
    visit(focal_.body_root.child_by_field("body"), active);
    for (ExecutionPath& p : active) {
      p.return_expr = "None";
      p.kind = PathKind::ImplicitNone;
      terminal_.push_back(std::move(p));
    }
    return std::move(terminal_);
  }

  std::vector<UnsupportedConstruct> unsupported() && { return std::move(unsupported_); }

 private:
  using Paths = std::vector<ExecutionPath>;

  std::string fragment(Node n) const { return normalize_code_fragment(focal_.tree.source(), n.span()); }

  // Conjoins `extra` onto every path. A path that already holds the exact
  // negation of an added constraint is infeasible and dropped; a constraint
  // it already holds is not repeated.
  static Paths extend(const Paths& paths, const std::vector<Constraint>& extra) {
    Paths out;
    out.reserve(paths.size());
    for (const ExecutionPath& p : paths) {
      ExecutionPath q = p;
      bool feasible = true;
      for (const Constraint& c : extra) {
        auto& cs = q.constraints;
        if (std::find(cs.begin(), cs.end(), negate(c)) != cs.end()) {
          feasible = false;
          break;
        }
        if (std::find(cs.begin(), cs.end(), c) == cs.end()) cs.push_back(c);
      }
      if (feasible) out.push_back(std::move(q));
    }
    return out;
  }

  static void append(Paths& into, Paths&& from) {
    std::move(from.begin(), from.end(), std::back_inserter(into));
  }

  void note(Node n, std::string_view kind) {
    std::string snippet = fragment(n);
    if (snippet.size() > 80) snippet = snippet.substr(0, 77) + "...";
    unsupported_.push_back(UnsupportedConstruct{std::string(kind), n.start_line(), snippet});
  }

  // Records opaque constructs inside an expression without visiting it as
  // a statement.
  void scan_expression(Node expr, bool is_condition) {
    if (is_condition && expr.is("boolean_operator")) note(expr, "boolean_operator");
    walk_preorder(expr, [&](Node n) {
      if (n.is("lambda")) return false;
      if (n.is("conditional_expression")) note(n, "conditional_expression");
      if (n.is("if_clause") && n.parent() && !n.parent().is("case_clause"))
        note(n, "comprehension_condition");
      return true;
    });
  }

  void terminate(Paths& active, const std::string& value, PathKind kind) {
    for (ExecutionPath& p : active) {
      p.return_expr = value;
      p.kind = kind;
      terminal_.push_back(std::move(p));
    }
    active.clear();
  }

  void visit(Node n, Paths& active) {
    if (!n || is_nested_scope(n)) return;
    const std::string_view kind = n.kind();
    if (kind == "if_statement") return visit_if(n, active);
    if (kind == "while_statement") return visit_loop(n, Constraint(fragment(n.child_by_field("condition"))), active);
    if (kind == "for_statement") {
      scan_expression(n.child_by_field("right"), false);
      return visit_loop(n, Constraint("loop over " + fragment(n.child_by_field("right")) + " executes"),
                        active);
    }
    if (kind == "return_statement") {
      Node value = n.child_by_field("value");
      if (value) scan_expression(value, false);
      const std::string expr = value ? fragment(value) : "None";
      terminate(active, expr, expr == "None" ? PathKind::ImplicitNone : PathKind::Returning);
      return;
    }
    if (kind == "raise_statement" && options_.track_raises) {
      Node value = n.child_by_field("value");
      terminate(active, "raises: " + (value ? fragment(value) : std::string("exception")),
                PathKind::Raising);
      return;
    }
    if (kind == "try_statement" || kind == "match_statement" || kind == "with_statement") {
      note(n, kind);
    }
    if (kind == "expression_statement") {
      scan_expression(n, false);
      return;
    }
    for (Node c : n.children()) visit(c, active);
  }

  void visit_if(Node n, Paths& active) {
    const Paths incoming = active;
    Paths result;

    Node cond = n.child_by_field("condition");
    scan_expression(cond, true);
    const Constraint first(fragment(cond));
    Paths branch = extend(incoming, {first});
    visit(n.child_by_field("consequence"), branch);
    append(result, std::move(branch));

    std::vector<Constraint> negated{negate(first)};
    bool has_else = false;
    for (Node alt : n.children_by_field("alternative")) {
      if (alt.is("elif_clause")) {
        Node c = alt.child_by_field("condition");
        scan_expression(c, true);
        const Constraint own(fragment(c));
        std::vector<Constraint> cs = negated;
        cs.push_back(own);
        Paths elif_paths = extend(incoming, cs);
        visit(alt.child_by_field("consequence"), elif_paths);
        append(result, std::move(elif_paths));
        negated.push_back(negate(own));
      } else {
        has_else = true;
        Paths else_paths = extend(incoming, negated);
        visit(alt.child_by_field("body"), else_paths);
        append(result, std::move(else_paths));
      }
    }
    if (!has_else) append(result, extend(incoming, negated));
    active = minimize_paths(result);
  }

  void visit_loop(Node n, const Constraint& cond, Paths& active) {
    if (n.is("while_statement")) scan_expression(n.child_by_field("condition"), true);
    const Paths incoming = active;
    Paths result = extend(incoming, {cond});
    visit(n.child_by_field("body"), result);
    append(result, extend(incoming, {negate(cond)}));
    if (Node alt = n.child_by_field("alternative")) visit(alt.child_by_field("body"), result);
    active = minimize_paths(result);
  }

  const FocalMethod& focal_;
  const AnalysisOptions& options_;
  Paths terminal_;
  std::vector<UnsupportedConstruct> unsupported_;
};

}  // namespace

Constraint::Constraint(std::string source_expr, bool is_negated) : negated(is_negated) {
  for (char& c : source_expr) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  std::size_t b = 0;
  std::size_t e = source_expr.size();
  while (b < e && is_space(source_expr[b])) ++b;
  while (e > b && is_space(source_expr[e - 1])) --e;
  if (b == e) throw Error(ErrorCode::InvalidInput, "constraint expression is empty");
  expr = source_expr.substr(b, e - b);
}

std::string Constraint::render() const { return negated ? "not (" + expr + ")" : expr; }

Constraint negate(const Constraint& c) {
  Constraint out = c;
  out.negated = !c.negated;
  return out;
}

std::string_view to_string(PathKind kind) {
  switch (kind) {
    case PathKind::Returning: return "returning";
    case PathKind::ImplicitNone: return "implicit-none";
    case PathKind::Raising: return "raising";
  }
  return "unknown";
}

bool ExecutionPath::contradictory() const {
  for (const Constraint& c : constraints) {
    if (std::find(constraints.begin(), constraints.end(), negate(c)) != constraints.end()) return true;
  }
  return false;
}

PathAnalysis analyze_paths(const FocalMethod& focal, const AnalysisOptions& options) {
  if (!focal.body_root || !focal.body_root.is("function_definition")) {
    throw Error(ErrorCode::InvalidInput, "focal method has no function definition node");
  }
  if (focal.tree.errors_within(focal.definition.span())) {
    throw Error(ErrorCode::InvalidInput,
                "focal method '" + focal.qualified_name + "' contains syntax errors");
  }
  PathCollector collector(focal, options);
  PathAnalysis out;
  out.collected = collector.run();
  out.unsupported = std::move(collector).unsupported();
  out.paths = minimize_paths(out.collected);
  out.max_paths = options.max_paths;
  if (options.max_paths != 0 && out.paths.size() > options.max_paths) {
    out.paths.resize(options.max_paths);
    out.truncated = true;
  }
  return out;
}

std::vector<ExecutionPath> collect_path_constraints(const FocalMethod& focal,
                                                    const AnalysisOptions& options) {
  return analyze_paths(focal, options).paths;
}

nlohmann::json to_json(const ExecutionPath& path) {
  nlohmann::json constraints = nlohmann::json::array();
  for (const Constraint& c : path.constraints) {
    constraints.push_back({{"expr", c.expr}, {"negated", c.negated}, {"rendered", c.render()}});
  }
  return {
      {"constraints", std::move(constraints)},
      {"return_expr", path.return_expr ? nlohmann::json(*path.return_expr) : nlohmann::json()},
      {"kind", to_string(path.kind)},
  };
}

nlohmann::json to_json(const PathAnalysis& analysis) {
  nlohmann::json collected = nlohmann::json::array();
  for (const auto& p : analysis.collected) collected.push_back(to_json(p));
  nlohmann::json paths = nlohmann::json::array();
  for (const auto& p : analysis.paths) paths.push_back(to_json(p));
  nlohmann::json unsupported = nlohmann::json::array();
  for (const auto& u : analysis.unsupported) {
    unsupported.push_back({{"kind", u.kind}, {"line", u.line}, {"snippet", u.snippet}});
  }
  return {
      {"paths", std::move(collected)},
      {"minimized_paths", std::move(paths)},
      {"unsupported_constructs", std::move(unsupported)},
      {"truncated", analysis.truncated},
      {"max_paths", analysis.max_paths},
  };
}

}  // namespace pathprompt
