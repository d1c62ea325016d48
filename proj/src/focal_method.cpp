#include "pathprompt/focal_method.hpp"

#include <filesystem>
#include <vector>

#include "pathprompt/errors.hpp"
#include "pathprompt/python_lexer.hpp"

namespace pathprompt {

namespace {

std::vector<std::string> split_dots(std::string_view s) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t dot = s.find('.', start);
    if (dot == std::string_view::npos) {
      parts.emplace_back(s.substr(start));
      break;
    }
    parts.emplace_back(s.substr(start, dot - start));
    start = dot + 1;
  }
  return parts;
}

std::string_view definition_name(Node def) {
  Node inner = unwrap_decorated(def);
  Node name = inner.child_by_field("name");
  return name ? name.text() : std::string_view{};
}

std::vector<Node> definitions_in(Node block, std::string_view kind, std::string_view name) {
  std::vector<Node> out;
  if (!block) return out;
  for (Node c : block.children()) {
    Node inner = unwrap_decorated(c);
    if (inner && inner.is(kind) && definition_name(c) == name) out.push_back(c);
  }
  return out;
}

struct Match {
  Node definition;
  std::optional<std::string> enclosing_class;
};

}  // namespace

Node unwrap_decorated(Node n) {
  if (n && n.is("decorated_definition")) return n.child_by_field("definition");
  return n;
}

std::string FocalMethod::display_name() const {
  return enclosing_class ? *enclosing_class + "." + method_name : method_name;
}

std::string FocalMethod::signature_params() const {
  Node params = body_root.child_by_field("parameters");
  Node ret = body_root.child_by_field("return_type");
  const Span span{params.span().begin, ret ? ret.span().end : params.span().end};
  const std::string_view src = tree.source().substr(span.begin, span.size());
  // One line; a wrapped parameter list loses the padding inside its brackets.
  std::string out;
  std::string_view prev;
  std::size_t prev_end = 0;
  for (const Token& t : tokenize_python(src)) {
    if (t.text.empty() || t.kind == TokenKind::Newline || t.kind == TokenKind::Indent ||
        t.kind == TokenKind::Dedent || t.kind == TokenKind::EndMarker)
      continue;
    if (!prev.empty() && t.span.begin > prev_end) {
      const std::string_view gap = src.substr(prev_end, t.span.begin - prev_end);
      const bool wrapped = gap.find('\n') != std::string_view::npos;
      const bool hug = prev == "(" || prev == "[" || prev == "{" || t.text == ")" || t.text == "]" ||
                       t.text == "}";
      if (!(wrapped && hug)) out += ' ';
    }
    out += t.text;
    prev = t.text;
    prev_end = t.span.end;
  }
  return out;
}

Span FocalMethod::line_aligned_span() const {
  const Span s = definition.span();
  return Span{tree.line_start(definition.start_line()), s.end};
}

std::string module_name_from_path(std::string_view path) {
  return std::filesystem::path(path).stem().string();
}

std::string dotted_module_path(std::string_view repo_root, std::string_view file) {
  namespace fs = std::filesystem;
  fs::path rel = fs::path(file).lexically_relative(fs::path(repo_root));
  if (rel.empty() || rel.native().starts_with("..")) rel = fs::path(file).filename();
  rel.replace_extension();
  std::string out;
  for (const auto& part : rel) {
    if (part == "." || part.empty()) continue;
    if (!out.empty()) out += '.';
    out += part.string();
  }
  if (out.ends_with(".__init__")) out.resize(out.size() - 9);
  return out;
}

FocalMethod locate_focal_method(const SyntaxTree& tree, std::string_view qualified_name,
                                std::string_view source_file) {
  const std::vector<std::string> parts = split_dots(qualified_name);
  for (const auto& p : parts) {
    if (p.empty()) {
      throw Error(ErrorCode::NotFound,
                  "malformed qualified name '" + std::string(qualified_name) + "'");
    }
  }
  const Node module = tree.root();
  std::vector<Match> matches;
  std::vector<std::string> module_parts;
  bool class_found = false;

  if (parts.size() >= 2) {
    const auto classes = definitions_in(module, "class_definition", parts[parts.size() - 2]);
    for (Node cls : classes) {
      Node body = unwrap_decorated(cls).child_by_field("body");
      for (Node m : definitions_in(body, "function_definition", parts.back())) {
        matches.push_back(Match{m, parts[parts.size() - 2]});
      }
    }
    if (!classes.empty()) {
      class_found = true;
      module_parts.assign(parts.begin(), parts.end() - 2);
    }
  }
  if (!class_found) {
    for (Node f : definitions_in(module, "function_definition", parts.back())) {
      matches.push_back(Match{f, std::nullopt});
    }
    module_parts.assign(parts.begin(), parts.end() - 1);
  }

  if (matches.empty()) {
    throw Error(ErrorCode::NotFound,
                "no definition found for '" + std::string(qualified_name) + "'");
  }
  if (matches.size() > 1) {
    throw Error(ErrorCode::Ambiguous, "'" + std::string(qualified_name) + "' matches " +
                                          std::to_string(matches.size()) + " definitions");
  }

  const Match& m = matches.front();
  FocalMethod fm;
  fm.tree = tree;
  fm.definition = m.definition;
  fm.body_root = unwrap_decorated(m.definition);
  fm.enclosing_class = m.enclosing_class;
  fm.method_name = std::string(definition_name(m.definition));
  fm.source_file = std::string(source_file);

  std::string module_name;
  for (const auto& p : module_parts) {
    if (!module_name.empty()) module_name += '.';
    module_name += p;
  }
  if (module_name.empty() && !source_file.empty()) module_name = module_name_from_path(source_file);
  fm.module_name = module_name;
  fm.qualified_name = module_name.empty() ? fm.display_name() : module_name + "." + fm.display_name();

  // Header runs to the ':' that precedes the body.
  std::uint32_t header_end = fm.body_root.span().end;
  Node body = fm.body_root.child_by_field("body");
  for (Node c : fm.body_root.children()) {
    if (c == body) break;
    if (!c.named() && c.kind() == ":") header_end = c.span().end;
  }
  const std::uint32_t header_begin = fm.definition.span().begin;
  fm.signature = std::string(tree.source().substr(header_begin, header_end - header_begin));
  return fm;
}

}  // namespace pathprompt
