#include "pathprompt/context_builder.hpp"

#include <algorithm>
#include <set>

#include "pathprompt/errors.hpp"
#include "pathprompt/python_lexer.hpp"
#include "pathprompt/python_parser.hpp"

namespace pathprompt {

namespace {

bool is_import(Node n) { return n.is("import_statement") || n.is("import_from_statement"); }

Snippet make_snippet(const SyntaxTree& tree, Node n, ContextPart part, std::uint32_t end) {
  Snippet s;
  s.part = part;
  s.span = Span{tree.line_start(n.start_line()), end};
  s.text = std::string(tree.source().substr(s.span.begin, s.span.size()));
  s.start_line = n.start_line();
  s.end_line = tree.line_of(end > s.span.begin ? end - 1 : end);
  return s;
}

Snippet make_snippet(const SyntaxTree& tree, Node n, ContextPart part) {
  return make_snippet(tree, n, part, n.span().end);
}

std::string_view def_name(Node def) {
  Node inner = unwrap_decorated(def);
  Node name = inner ? inner.child_by_field("name") : Node();
  return name ? name.text() : std::string_view{};
}

// Identifier targets of a module-level assignment, including tuple targets
// and chained assignments.
void assignment_targets(Node assignment, std::vector<std::string>& out) {
  Node left = assignment.child_by_field("left");
  std::vector<Node> stack{left};
  while (!stack.empty()) {
    Node n = stack.back();
    stack.pop_back();
    if (!n) continue;
    if (n.is("identifier")) {
      out.emplace_back(n.text());
    } else if (n.is("expression_list") || n.is("pattern_list") || n.is("tuple") ||
               n.is("list") || n.is("parenthesized_expression") || n.is("list_splat") ||
               n.is("list_splat_pattern")) {
      for (Node c : n.named_children()) stack.push_back(c);
    }
  }
  Node right = assignment.child_by_field("right");
  if (right && right.is("assignment")) assignment_targets(right, out);
}

std::set<std::string, std::less<>> identifiers_in(Node n) {
  std::set<std::string, std::less<>> out;
  walk_preorder(n, [&](Node c) {
    if (c.is("identifier")) out.emplace(c.text());
    return true;
  });
  return out;
}

std::set<std::string, std::less<>> called_attributes(Node n) {
  std::set<std::string, std::less<>> out;
  walk_preorder(n, [&](Node c) {
    if (c.is("call")) {
      Node fn = c.child_by_field("function");
      if (fn && fn.is("attribute")) out.emplace(fn.child_by_field("attribute").text());
    }
    return true;
  });
  return out;
}

std::size_t rendered_tokens(const FocalContext& ctx, const TokenEstimator& estimator) {
  return estimator(ctx.render());
}

// Normalized one-binding-per-line forms of an import statement.
std::vector<std::string> normalized_import_lines(Node stmt) {
  std::vector<std::string> lines;
  const std::string_view src = [&] {
    // Node::text() is relative to its own tree; recover the full source via
    // the root to use normalize_code_fragment on child spans.
    Node root = stmt;
    while (root.parent()) root = root.parent();
    return root.text();
  }();
  auto norm = [&](Node n) { return normalize_code_fragment(src, n.span()); };
  if (stmt.is("import_statement")) {
    for (Node name : stmt.children_by_field("name")) lines.push_back("import " + norm(name));
    return lines;
  }
  const std::string module = norm(stmt.child_by_field("module_name"));
  bool wildcard = false;
  for (Node c : stmt.children()) {
    if (c.is("wildcard_import")) wildcard = true;
  }
  if (wildcard) {
    lines.push_back("from " + module + " import *");
    return lines;
  }
  for (Node name : stmt.children_by_field("name")) {
    lines.push_back("from " + module + " import " + norm(name));
  }
  return lines;
}

// Binding introduced by one normalized import line.
std::string binding_of_line(std::string_view line) {
  const std::size_t as = line.rfind(" as ");
  if (as != std::string_view::npos) return std::string(line.substr(as + 4));
  if (line.starts_with("import ")) return std::string(line.substr(7));
  const std::size_t imp = line.rfind(" import ");
  if (imp == std::string_view::npos) return {};
  std::string name(line.substr(imp + 8));
  return name == "*" ? std::string() : name;
}

}  // namespace

std::string_view to_string(ContextPart part) {
  switch (part) {
    case ContextPart::ImportsAndGlobals: return "imports_and_globals";
    case ContextPart::TypeContext: return "type_context";
    case ContextPart::FocalClassType: return "focal_class_type";
    case ContextPart::FocalClassMethods: return "focal_class_methods";
    case ContextPart::FocalMethod: return "focal_method";
  }
  return "unknown";
}

std::size_t estimate_tokens(std::string_view text) { return (text.size() + 3) / 4; }

std::vector<const Snippet*> FocalContext::ordered() const {
  std::vector<const Snippet*> out;
  for (const auto& s : imports_and_globals) out.push_back(&s);
  for (const auto& s : type_context) out.push_back(&s);
  for (const auto& s : focal_class_type) out.push_back(&s);
  for (const auto& s : focal_class_methods) out.push_back(&s);
  out.push_back(&focal_method_def);
  return out;
}

std::string FocalContext::render() const {
  std::string out;
  auto add_group = [&](const std::vector<Snippet>& group, std::string_view inner_sep) {
    if (group.empty()) return;
    if (!out.empty()) out += "\n\n";
    for (std::size_t i = 0; i < group.size(); ++i) {
      if (i) out += inner_sep;
      out += group[i].text;
    }
  };
  // Imports and globals keep their one-per-line layout.
  add_group(imports_and_globals, "\n");
  add_group(type_context, "\n\n\n");
  add_group(focal_class_type, "\n");
  add_group(focal_class_methods, "\n\n");
  if (!out.empty()) out += "\n\n";
  out += focal_method_def.text;
  return out;
}

FocalContext build_generation_context(const SyntaxTree& file_tree, const FocalMethod& focal,
                                      std::size_t budget, const TokenEstimator& estimator) {
  FocalContext ctx;
  ctx.module_name = focal.module_name;
  const Node module = file_tree.root();

  ctx.focal_method_def = make_snippet(file_tree, focal.definition, ContextPart::FocalMethod);
  ctx.focal_method_def.label = focal.display_name();
  if (!focal.enclosing_class) ctx.focal_method_def.defines.push_back(focal.method_name);

  const auto used = identifiers_in(focal.definition);

  // Locate the focal class node (module-level) when there is one.
  Node focal_class;
  if (focal.enclosing_class) {
    for (Node c : module.children()) {
      Node inner = unwrap_decorated(c);
      if (inner && inner.is("class_definition") && def_name(c) == *focal.enclosing_class &&
          focal.definition.span().begin >= c.span().begin &&
          focal.definition.span().end <= c.span().end) {
        focal_class = c;
      }
    }
  }

  for (Node c : module.children()) {
    if (is_import(c)) {
      Snippet s = make_snippet(file_tree, c, ContextPart::ImportsAndGlobals);
      s.is_import = true;
      s.label = normalize_code_fragment(file_tree.source(), c.span());
      ctx.imports_and_globals.push_back(std::move(s));
      continue;
    }
    if (c.is("expression_statement") && c.child(0) && c.child(0).is("assignment")) {
      std::vector<std::string> names;
      assignment_targets(c.child(0), names);
      if (names.empty()) continue;
      Snippet s = make_snippet(file_tree, c, ContextPart::ImportsAndGlobals);
      s.defines = names;
      for (const auto& n : names) s.label += (s.label.empty() ? "" : ", ") + n;
      ctx.imports_and_globals.push_back(std::move(s));
      continue;
    }
    Node inner = unwrap_decorated(c);
    if (!inner || !(inner.is("function_definition") || inner.is("class_definition"))) continue;
    if (c == focal.definition || c == focal_class) continue;
    const std::string_view name = def_name(c);
    if (!used.contains(name)) continue;
    Snippet s = make_snippet(file_tree, c, ContextPart::TypeContext);
    s.label = std::string(name);
    s.defines.push_back(s.label);
    ctx.type_context.push_back(std::move(s));
  }

  if (focal_class) {
    Node cls = unwrap_decorated(focal_class);
    Node body = cls.child_by_field("body");
    std::uint32_t header_end = cls.span().end;
    for (Node c : cls.children()) {
      if (c == body) break;
      if (!c.named() && c.kind() == ":") header_end = c.span().end;
    }
    Snippet header = make_snippet(file_tree, focal_class, ContextPart::FocalClassType, header_end);
    header.label = *focal.enclosing_class;
    header.defines.push_back(*focal.enclosing_class);
    ctx.focal_class_type.push_back(std::move(header));

    const auto called = called_attributes(focal.definition);
    for (Node m : body.children()) {
      Node inner = unwrap_decorated(m);
      if (!inner || !inner.is("function_definition") || m == focal.definition) continue;
      const std::string_view name = def_name(m);
      if (name == "__init__") {
        Snippet s = make_snippet(file_tree, m, ContextPart::FocalClassType);
        s.label = "__init__";
        ctx.focal_class_type.push_back(std::move(s));
      } else if (called.contains(name)) {
        Snippet s = make_snippet(file_tree, m, ContextPart::FocalClassMethods);
        s.label = std::string(name);
        ctx.focal_class_methods.push_back(std::move(s));
      }
    }
    // Constructor follows the header even if defined later in the class.
    std::stable_sort(ctx.focal_class_type.begin(), ctx.focal_class_type.end(),
                     [](const Snippet& a, const Snippet& b) {
                       return a.label != "__init__" && b.label == "__init__";
                     });
  }

  return fit_to_budget(std::move(ctx), budget, estimator);
}

FocalContext fit_to_budget(FocalContext ctx, std::size_t budget, const TokenEstimator& estimator) {
  if (budget == 0) return ctx;
  if (estimator(ctx.focal_method_def.text) > budget) {
    throw Error(ErrorCode::BudgetExceeded, "focal method '" + ctx.focal_method_def.label +
                                               "' alone exceeds the context budget of " +
                                               std::to_string(budget) + " tokens");
  }
  auto over = [&] { return rendered_tokens(ctx, estimator) > budget; };
  while (over() && !ctx.focal_class_methods.empty()) {
    ctx.dropped.push_back(std::move(ctx.focal_class_methods.back()));
    ctx.focal_class_methods.pop_back();
  }
  while (over() && !ctx.type_context.empty()) {
    auto largest = std::max_element(ctx.type_context.begin(), ctx.type_context.end(),
                                    [](const Snippet& a, const Snippet& b) {
                                      return a.text.size() < b.text.size();
                                    });
    ctx.dropped.push_back(std::move(*largest));
    ctx.type_context.erase(largest);
  }
  for (std::size_t i = ctx.imports_and_globals.size(); over() && i-- > 0;) {
    if (ctx.imports_and_globals[i].is_import) continue;
    ctx.dropped.push_back(std::move(ctx.imports_and_globals[i]));
    ctx.imports_and_globals.erase(ctx.imports_and_globals.begin() + static_cast<std::ptrdiff_t>(i));
  }
  return ctx;
}

bool ExecutionContext::binds(std::string_view name) const {
  return std::binary_search(bound_names.begin(), bound_names.end(), name);
}

ExecutionContext build_execution_context(const FocalContext& ctx) {
  std::set<std::string> lines;
  for (const Snippet& s : ctx.imports_and_globals) {
    if (!s.is_import) continue;
    const SyntaxTree t = parse_source(s.text);
    for (Node stmt : t.root().children()) {
      if (!is_import(stmt)) continue;
      for (auto& line : normalized_import_lines(stmt)) lines.insert(std::move(line));
    }
  }
  if (!ctx.module_name.empty()) {
    for (const Snippet* s : ctx.ordered()) {
      for (const auto& name : s->defines) {
        if (name.starts_with("__") && name.ends_with("__")) continue;  // module dunders
        lines.insert("from " + ctx.module_name + " import " + name);
      }
    }
  }

  ExecutionContext out;
  // `from __future__` imports must open the file.
  std::vector<std::string> future;
  for (const auto& l : lines) {
    if (l.starts_with("from __future__ ")) {
      future.push_back(l);
    } else {
      out.import_lines.push_back(l);
    }
  }
  out.import_lines.insert(out.import_lines.begin(), future.begin(), future.end());

  std::set<std::string> bound;
  for (const auto& l : out.import_lines) {
    std::string b = binding_of_line(l);
    if (!b.empty()) bound.insert(std::move(b));
    out.preamble += l;
    out.preamble += '\n';
  }
  out.bound_names.assign(bound.begin(), bound.end());
  return out;
}

std::vector<std::string> import_bindings(Node import_stmt) {
  std::vector<std::string> out;
  for (const auto& line : normalized_import_lines(import_stmt)) {
    std::string b = binding_of_line(line);
    if (!b.empty()) out.push_back(std::move(b));
  }
  return out;
}

std::string strip_duplicate_imports(std::string_view test_code, const ExecutionContext& exec_ctx) {
  std::string code(test_code);
  const bool parsed_before = check_parses(code);
  // Each pass removes at most one statement; spans are recomputed afterwards.
  std::set<std::pair<std::uint32_t, std::uint32_t>> rejected;  // line ranges kept on purpose
  while (true) {
    const SyntaxTree tree = parse_source(code);
    bool removed = false;
    std::vector<Node> imports;
    walk_preorder(tree.root(), [&](Node n) {
      if (is_import(n)) imports.push_back(n);
      return !n.is("ERROR");
    });
    for (auto it = imports.rbegin(); it != imports.rend() && !removed; ++it) {
      const Node stmt = *it;
      const auto bindings = import_bindings(stmt);
      if (bindings.empty()) continue;
      if (!std::all_of(bindings.begin(), bindings.end(),
                       [&](const std::string& b) { return exec_ctx.binds(b); }))
        continue;
      const std::uint32_t first = stmt.start_line();
      const std::uint32_t last = stmt.end_line();
      if (rejected.contains({first, last})) continue;
      const std::uint32_t begin = tree.line_start(first);
      const std::uint32_t end = tree.line_start(last + 1);
      // The statement must own its lines (nothing else but blanks/comments).
      const std::string_view before = tree.source().substr(begin, stmt.span().begin - begin);
      std::string_view after = tree.source().substr(stmt.span().end, end - stmt.span().end);
      if (const auto hash = after.find('#'); hash != std::string_view::npos) after = after.substr(0, hash);
      auto blank = [](std::string_view s) {
        return s.find_first_not_of(" \t\r\n\f") == std::string_view::npos;
      };
      if (!blank(before) || !blank(after)) continue;
      std::string candidate = code.substr(0, begin) + code.substr(end);
      if (parsed_before && !check_parses(candidate)) {
        rejected.insert({first, last});
        continue;
      }
      code = std::move(candidate);
      removed = true;
    }
    if (!removed) break;
  }
  return code;
}

nlohmann::json to_json(const FocalContext& ctx) {
  nlohmann::json parts = nlohmann::json::array();
  auto add = [&](const Snippet& s) {
    parts.push_back({{"part", to_string(s.part)},
                     {"label", s.label},
                     {"text", s.text},
                     {"span", {{"begin", s.span.begin}, {"end", s.span.end}}},
                     {"lines", {s.start_line, s.end_line}}});
  };
  for (const Snippet* s : ctx.ordered()) add(*s);
  nlohmann::json dropped = nlohmann::json::array();
  for (const Snippet& s : ctx.dropped) dropped.push_back({{"part", to_string(s.part)}, {"label", s.label}});
  return {{"module", ctx.module_name}, {"snippets", std::move(parts)}, {"dropped", std::move(dropped)}};
}

nlohmann::json to_json(const ExecutionContext& ctx) {
  return {{"preamble", ctx.preamble},
          {"import_lines", ctx.import_lines},
          {"bound_names", ctx.bound_names}};
}

}  // namespace pathprompt
