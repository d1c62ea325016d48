#pragma once

// Concrete syntax tree for Python 3 source. Node kinds follow the
// tree-sitter-python naming scheme so that downstream passes read like the
// usual grammar vocabulary ("if_statement", "elif_clause", "block", ...).
// Punctuation and keyword tokens are anonymous leaves whose kind is the token
// text itself.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pathprompt {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

struct Span {
  std::uint32_t begin = 0;  // byte offset, inclusive
  std::uint32_t end = 0;    // byte offset, exclusive

  std::uint32_t size() const { return end - begin; }
  bool contains(const Span& other) const {
    return begin <= other.begin && other.end <= end;
  }
  friend bool operator==(const Span&, const Span&) = default;
};

namespace detail {

struct NodeRecord {
  std::string_view kind;   // static storage
  std::string_view field;  // role inside the parent, may be empty
  Span span;
  std::uint32_t first_child = 0;  // index into TreeStorage::child_ids
  std::uint32_t child_count = 0;
  NodeId parent = kNoNode;
  bool named = true;
};

struct TreeStorage {
  std::string source;
  std::vector<NodeRecord> nodes;
  std::vector<NodeId> child_ids;
  std::vector<std::uint32_t> line_starts;  // byte offset of each line
  NodeId root = kNoNode;
  std::size_t error_count = 0;
};

}  // namespace detail

class SyntaxTree;

/// Lightweight view of one node. Valid as long as any copy of the owning
/// SyntaxTree is alive.
class Node {
 public:
  Node() = default;
  Node(const detail::TreeStorage* storage, NodeId id) : storage_(storage), id_(id) {}

  explicit operator bool() const { return storage_ != nullptr && id_ != kNoNode; }
  NodeId id() const { return id_; }

  std::string_view kind() const { return rec().kind; }
  std::string_view field() const { return rec().field; }
  bool is(std::string_view k) const { return rec().kind == k; }
  bool named() const { return rec().named; }
  bool is_error() const { return rec().kind == "ERROR"; }
  Span span() const { return rec().span; }
  std::string_view text() const;

  /// 1-based line numbers of the first and last byte.
  std::uint32_t start_line() const;
  std::uint32_t end_line() const;

  Node parent() const { return Node(storage_, rec().parent); }
  std::size_t child_count() const { return rec().child_count; }
  Node child(std::size_t i) const;
  std::vector<Node> children() const;
  std::vector<Node> named_children() const;

  /// First child carrying the given field label.
  Node child_by_field(std::string_view field) const;
  std::vector<Node> children_by_field(std::string_view field) const;

  friend bool operator==(const Node& a, const Node& b) {
    return a.storage_ == b.storage_ && a.id_ == b.id_;
  }

 private:
  const detail::NodeRecord& rec() const { return storage_->nodes[id_]; }

  const detail::TreeStorage* storage_ = nullptr;
  NodeId id_ = kNoNode;
};

/// Immutable parse result. Copies share storage.
class SyntaxTree {
 public:
  SyntaxTree() = default;
  explicit SyntaxTree(std::shared_ptr<const detail::TreeStorage> storage)
      : storage_(std::move(storage)) {}

  Node root() const { return Node(storage_.get(), storage_->root); }
  Node node(NodeId id) const { return Node(storage_.get(), id); }
  std::string_view source() const { return storage_->source; }
  std::size_t node_count() const { return storage_->nodes.size(); }
  std::size_t error_count() const { return storage_->error_count; }
  bool has_errors() const { return storage_->error_count != 0; }

  /// Byte offset at which 1-based `line` begins.
  std::uint32_t line_start(std::uint32_t line) const;
  std::uint32_t line_of(std::uint32_t offset) const;
  std::uint32_t line_count() const {
    return static_cast<std::uint32_t>(storage_->line_starts.size());
  }

  /// True if any ERROR node overlaps `span`.
  bool errors_within(Span span) const;

  /// S-expression dump of named nodes, mainly for debugging and tests.
  std::string to_sexp(Node n) const;
  std::string to_sexp() const { return to_sexp(root()); }

 private:
  std::shared_ptr<const detail::TreeStorage> storage_;
};

/// Preorder visit over every node below (and including) `n`.
template <typename Fn>
void walk_preorder(Node n, Fn&& fn) {
  std::vector<Node> stack{n};
  while (!stack.empty()) {
    Node cur = stack.back();
    stack.pop_back();
    if (!fn(cur)) continue;
    for (std::size_t i = cur.child_count(); i-- > 0;) stack.push_back(cur.child(i));
  }
}

}  // namespace pathprompt
