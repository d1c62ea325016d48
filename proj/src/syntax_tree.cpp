#include "pathprompt/syntax_tree.hpp"

#include <algorithm>

namespace pathprompt {

std::string_view Node::text() const {
  const Span s = span();
  return std::string_view(storage_->source).substr(s.begin, s.size());
}

std::uint32_t Node::start_line() const {
  const auto& ls = storage_->line_starts;
  return static_cast<std::uint32_t>(std::upper_bound(ls.begin(), ls.end(), span().begin) -
                                    ls.begin());
}

std::uint32_t Node::end_line() const {
  const auto& ls = storage_->line_starts;
  const Span s = span();
  const std::uint32_t last = s.end > s.begin ? s.end - 1 : s.begin;
  return static_cast<std::uint32_t>(std::upper_bound(ls.begin(), ls.end(), last) - ls.begin());
}

Node Node::child(std::size_t i) const {
  const auto& r = rec();
  if (i >= r.child_count) return Node();
  return Node(storage_, storage_->child_ids[r.first_child + i]);
}

std::vector<Node> Node::children() const {
  std::vector<Node> out;
  out.reserve(child_count());
  for (std::size_t i = 0; i < child_count(); ++i) out.push_back(child(i));
  return out;
}

std::vector<Node> Node::named_children() const {
  std::vector<Node> out;
  for (std::size_t i = 0; i < child_count(); ++i) {
    Node c = child(i);
    if (c.named()) out.push_back(c);
  }
  return out;
}

Node Node::child_by_field(std::string_view f) const {
  for (std::size_t i = 0; i < child_count(); ++i) {
    Node c = child(i);
    if (c.field() == f) return c;
  }
  return Node();
}

std::vector<Node> Node::children_by_field(std::string_view f) const {
  std::vector<Node> out;
  for (std::size_t i = 0; i < child_count(); ++i) {
    Node c = child(i);
    if (c.field() == f) out.push_back(c);
  }
  return out;
}

std::uint32_t SyntaxTree::line_start(std::uint32_t line) const {
  const auto& ls = storage_->line_starts;
  if (line == 0) return 0;
  if (line > ls.size()) return static_cast<std::uint32_t>(storage_->source.size());
  return ls[line - 1];
}

std::uint32_t SyntaxTree::line_of(std::uint32_t offset) const {
  const auto& ls = storage_->line_starts;
  return static_cast<std::uint32_t>(std::upper_bound(ls.begin(), ls.end(), offset) - ls.begin());
}

bool SyntaxTree::errors_within(Span span) const {
  for (const auto& n : storage_->nodes) {
    if (n.kind == "ERROR" && n.span.begin < std::max(span.end, span.begin + 1) &&
        span.begin < std::max(n.span.end, n.span.begin + 1))
      return true;
  }
  return false;
}

std::string SyntaxTree::to_sexp(Node n) const {
  std::string out = "(";
  out += n.kind();
  for (Node c : n.children()) {
    if (!c.named()) continue;
    out += ' ';
    if (!c.field().empty()) {
      out += c.field();
      out += ": ";
    }
    out += to_sexp(c);
  }
  out += ')';
  return out;
}

}  // namespace pathprompt
