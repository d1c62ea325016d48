#include "pathprompt/python_parser.hpp"

#include <algorithm>
#include <array>
#include <utility>
#include <vector>

#include "pathprompt/errors.hpp"
#include "pathprompt/python_lexer.hpp"

namespace pathprompt {

namespace {

struct ParseFail {};

struct BuildNode {
  std::string_view kind;
  std::string_view field;
  Span span;
  std::vector<NodeId> kids;
  bool named = true;
};

bool is_augassign(std::string_view op) {
  static constexpr std::array<std::string_view, 13> kAug = {
      "+=", "-=", "*=", "/=", "//=", "%=", "@=", "&=", "|=", "^=", ">>=", "<<=", "**="};
  return std::find(kAug.begin(), kAug.end(), op) != kAug.end();
}

class Parser {
 public:
  Parser(std::string_view src, std::vector<Token> toks) : src_(src), toks_(std::move(toks)) {}

  NodeId parse_module() {
    std::vector<NodeId> kids;
    while (cur().kind != TokenKind::EndMarker) statement_with_recovery(kids);
    const NodeId root = make("module", std::move(kids));
    arena_[root].span = Span{0, static_cast<std::uint32_t>(src_.size())};
    return root;
  }

  std::vector<BuildNode> take_arena() { return std::move(arena_); }

 private:
  // ---- token helpers -------------------------------------------------------

  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(std::size_t k = 1) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool at(TokenKind k) const { return cur().kind == k; }
  bool at_op(std::string_view op) const { return cur().kind == TokenKind::Op && cur().text == op; }
  bool at_kw(std::string_view kw) const {
    return cur().kind == TokenKind::Keyword && cur().text == kw;
  }
  static bool is_op(const Token& t, std::string_view op) {
    return t.kind == TokenKind::Op && t.text == op;
  }
  static bool is_kw(const Token& t, std::string_view kw) {
    return t.kind == TokenKind::Keyword && t.text == kw;
  }

  [[noreturn]] static void fail() { throw ParseFail{}; }

  NodeId push(BuildNode n) {
    arena_.push_back(std::move(n));
    return static_cast<NodeId>(arena_.size() - 1);
  }

  NodeId leaf_as(std::string_view kind, bool named) {
    const Token& t = cur();
    ++pos_;
    return push(BuildNode{kind, {}, t.span, {}, named});
  }

  NodeId leaf() {
    const Token& t = cur();
    switch (t.kind) {
      case TokenKind::Name:
        return leaf_as("identifier", true);
      case TokenKind::Number: {
        const bool hex = t.text.size() > 1 && t.text[0] == '0' &&
                         std::string_view("xXoObB").find(t.text[1]) != std::string_view::npos;
        const bool is_float =
            !hex && t.text.find_first_of(".eEjJ") != std::string_view::npos;
        return leaf_as(is_float ? "float" : "integer", true);
      }
      case TokenKind::String:
        return leaf_as("string", true);
      case TokenKind::Keyword:
        if (t.text == "True") return leaf_as("true", true);
        if (t.text == "False") return leaf_as("false", true);
        if (t.text == "None") return leaf_as("none", true);
        return leaf_as(t.text, false);
      case TokenKind::Op:
        return leaf_as(t.text, false);
      default:
        fail();
    }
  }

  NodeId expect_op(std::string_view op) {
    if (!at_op(op)) fail();
    return leaf();
  }
  NodeId expect_kw(std::string_view kw) {
    if (!at_kw(kw)) fail();
    return leaf();
  }
  NodeId expect_name() {
    if (!at(TokenKind::Name)) fail();
    return leaf();
  }
  void expect_newline() {
    if (!at(TokenKind::Newline)) fail();
    ++pos_;
  }

  NodeId make(std::string_view kind, std::vector<NodeId> kids) {
    Span span{cur().span.begin, cur().span.begin};
    if (!kids.empty()) span = Span{arena_[kids.front()].span.begin, arena_[kids.back()].span.end};
    return push(BuildNode{kind, {}, span, std::move(kids), true});
  }

  NodeId field(NodeId id, std::string_view name) {
    arena_[id].field = name;
    return id;
  }

  // ---- statements ----------------------------------------------------------

  void statement_with_recovery(std::vector<NodeId>& out) {
    const std::size_t mark = arena_.size();
    const std::size_t start = pos_;
    std::vector<NodeId> produced;
    try {
      statement(produced);
      out.insert(out.end(), produced.begin(), produced.end());
    } catch (const ParseFail&) {
      arena_.resize(mark);
      out.push_back(recover(start));
    }
  }

  // Consumes the rest of the broken logical line and, if it opened one, the
  // indented block that follows it.
  NodeId recover(std::size_t start) {
    pos_ = start;
    std::vector<NodeId> kids;
    auto take_leaf = [&] {
      const Token& t = cur();
      const bool named = t.kind == TokenKind::Name || t.kind == TokenKind::Number ||
                         t.kind == TokenKind::String;
      kids.push_back(push(BuildNode{named ? std::string_view("identifier") : t.text, {}, t.span,
                                    {}, named}));
      if (t.kind == TokenKind::Number) arena_[kids.back()].kind = "integer";
      if (t.kind == TokenKind::String) arena_[kids.back()].kind = "string";
      ++pos_;
    };
    int depth = 0;
    bool ended_on_newline = false;
    while (!at(TokenKind::EndMarker)) {
      if (at(TokenKind::Dedent)) {
        if (depth == 0) break;
        ++pos_;
        if (--depth == 0) break;
        continue;
      }
      if (at(TokenKind::Indent)) {
        ++depth;
        ++pos_;
        continue;
      }
      if (at(TokenKind::Newline)) {
        ++pos_;
        if (depth == 0) {
          ended_on_newline = true;
          break;
        }
        continue;
      }
      take_leaf();
    }
    if (ended_on_newline && at(TokenKind::Indent)) {
      ++pos_;
      int d = 1;
      while (d > 0 && !at(TokenKind::EndMarker)) {
        if (at(TokenKind::Indent)) {
          ++d;
          ++pos_;
        } else if (at(TokenKind::Dedent)) {
          --d;
          ++pos_;
        } else if (at(TokenKind::Newline)) {
          ++pos_;
        } else {
          take_leaf();
        }
      }
    }
    if (pos_ == start && !at(TokenKind::EndMarker)) ++pos_;
    NodeId err = push(BuildNode{"ERROR", {}, toks_[start].span, std::move(kids), true});
    auto& e = arena_[err];
    if (!e.kids.empty()) {
      e.span = Span{arena_[e.kids.front()].span.begin, arena_[e.kids.back()].span.end};
    } else {
      e.span = Span{toks_[start].span.begin, toks_[start].span.begin};
    }
    return err;
  }

  void statement(std::vector<NodeId>& out) {
    const Token& t = cur();
    if (t.kind == TokenKind::Keyword) {
      if (t.text == "if") return out.push_back(if_statement());
      if (t.text == "while") return out.push_back(while_statement());
      if (t.text == "for") return out.push_back(for_statement());
      if (t.text == "try") return out.push_back(try_statement());
      if (t.text == "with") return out.push_back(with_statement());
      if (t.text == "def") return out.push_back(function_definition());
      if (t.text == "class") return out.push_back(class_definition());
      if (t.text == "async") {
        const Token& n = peek();
        if (is_kw(n, "def")) return out.push_back(function_definition());
        if (is_kw(n, "for")) return out.push_back(for_statement());
        if (is_kw(n, "with")) return out.push_back(with_statement());
        fail();
      }
    }
    if (at_op("@")) return out.push_back(decorated_definition());
    if (t.kind == TokenKind::Name && t.text == "match" && maybe_match()) {
      const std::size_t mark = arena_.size();
      const std::size_t save = pos_;
      try {
        return out.push_back(match_statement());
      } catch (const ParseFail&) {
        arena_.resize(mark);
        pos_ = save;
      }
    }
    simple_statements(out);
  }

  bool maybe_match() const {
    const Token& n = peek();
    if (n.kind == TokenKind::Newline || n.kind == TokenKind::EndMarker) return false;
    if (n.kind == TokenKind::Op &&
        (n.text == "=" || n.text == "." || n.text == ":" || n.text == "," || n.text == ")" ||
         n.text == ";" || is_augassign(n.text)))
      return false;
    return true;
  }

  void simple_statements(std::vector<NodeId>& out) {
    while (true) {
      out.push_back(small_statement());
      if (at_op(";")) {
        out.push_back(leaf());
        if (at(TokenKind::Newline)) break;
        continue;
      }
      break;
    }
    expect_newline();
  }

  NodeId block() {
    std::vector<NodeId> kids;
    if (at(TokenKind::Newline)) {
      ++pos_;
      if (!at(TokenKind::Indent)) fail();
      ++pos_;
      while (!at(TokenKind::Dedent) && !at(TokenKind::EndMarker)) statement_with_recovery(kids);
      if (at(TokenKind::Dedent)) ++pos_;
    } else {
      simple_statements(kids);
    }
    return make("block", std::move(kids));
  }

  NodeId if_statement() {
    std::vector<NodeId> kids;
    kids.push_back(expect_kw("if"));
    kids.push_back(field(named_expression(), "condition"));
    kids.push_back(expect_op(":"));
    kids.push_back(field(block(), "consequence"));
    while (at_kw("elif")) {
      std::vector<NodeId> ek;
      ek.push_back(leaf());
      ek.push_back(field(named_expression(), "condition"));
      ek.push_back(expect_op(":"));
      ek.push_back(field(block(), "consequence"));
      kids.push_back(field(make("elif_clause", std::move(ek)), "alternative"));
    }
    if (at_kw("else")) kids.push_back(field(else_clause(), "alternative"));
    return make("if_statement", std::move(kids));
  }

  NodeId else_clause() {
    std::vector<NodeId> k;
    k.push_back(expect_kw("else"));
    k.push_back(expect_op(":"));
    k.push_back(field(block(), "body"));
    return make("else_clause", std::move(k));
  }

  NodeId while_statement() {
    std::vector<NodeId> kids;
    kids.push_back(expect_kw("while"));
    kids.push_back(field(named_expression(), "condition"));
    kids.push_back(expect_op(":"));
    kids.push_back(field(block(), "body"));
    if (at_kw("else")) kids.push_back(field(else_clause(), "alternative"));
    return make("while_statement", std::move(kids));
  }

  NodeId for_statement() {
    std::vector<NodeId> kids;
    if (at_kw("async")) kids.push_back(leaf());
    kids.push_back(expect_kw("for"));
    kids.push_back(field(target_list(), "left"));
    kids.push_back(expect_kw("in"));
    kids.push_back(field(star_expressions(), "right"));
    kids.push_back(expect_op(":"));
    kids.push_back(field(block(), "body"));
    if (at_kw("else")) kids.push_back(field(else_clause(), "alternative"));
    return make("for_statement", std::move(kids));
  }

  NodeId try_statement() {
    std::vector<NodeId> kids;
    kids.push_back(expect_kw("try"));
    kids.push_back(expect_op(":"));
    kids.push_back(field(block(), "body"));
    bool handlers = false;
    while (at_kw("except")) {
      handlers = true;
      std::vector<NodeId> ek;
      ek.push_back(leaf());
      std::string_view kind = "except_clause";
      if (at_op("*")) {
        ek.push_back(leaf());
        kind = "except_group_clause";
      }
      if (!at_op(":")) {
        ek.push_back(field(expression(), "value"));
        if (at_kw("as")) {
          ek.push_back(leaf());
          ek.push_back(field(expect_name(), "alias"));
        }
      }
      ek.push_back(expect_op(":"));
      ek.push_back(field(block(), "body"));
      kids.push_back(make(kind, std::move(ek)));
    }
    if (handlers && at_kw("else")) kids.push_back(else_clause());
    bool final_clause = false;
    if (at_kw("finally")) {
      final_clause = true;
      std::vector<NodeId> fk;
      fk.push_back(leaf());
      fk.push_back(expect_op(":"));
      fk.push_back(field(block(), "body"));
      kids.push_back(make("finally_clause", std::move(fk)));
    }
    if (!handlers && !final_clause) fail();
    return make("try_statement", std::move(kids));
  }

  NodeId with_item() {
    std::vector<NodeId> k;
    k.push_back(field(expression(), "value"));
    if (at_kw("as")) {
      k.push_back(leaf());
      k.push_back(field(star_target(), "alias"));
    }
    return make("with_item", std::move(k));
  }

  NodeId with_statement() {
    std::vector<NodeId> kids;
    if (at_kw("async")) kids.push_back(leaf());
    kids.push_back(expect_kw("with"));
    bool done = false;
    if (at_op("(")) {
      // Parenthesized item list; falls back to a plain expression item.
      const std::size_t mark = arena_.size();
      const std::size_t save = pos_;
      try {
        std::vector<NodeId> items;
        items.push_back(leaf());
        while (!at_op(")")) {
          items.push_back(with_item());
          if (!at_op(",")) break;
          items.push_back(leaf());
        }
        items.push_back(expect_op(")"));
        if (!at_op(":")) fail();
        kids.push_back(make("with_clause", std::move(items)));
        done = true;
      } catch (const ParseFail&) {
        arena_.resize(mark);
        pos_ = save;
      }
    }
    if (!done) {
      std::vector<NodeId> items;
      items.push_back(with_item());
      while (at_op(",")) {
        items.push_back(leaf());
        items.push_back(with_item());
      }
      kids.push_back(make("with_clause", std::move(items)));
    }
    kids.push_back(expect_op(":"));
    kids.push_back(field(block(), "body"));
    return make("with_statement", std::move(kids));
  }

  NodeId function_definition() {
    std::vector<NodeId> kids;
    if (at_kw("async")) kids.push_back(leaf());
    kids.push_back(expect_kw("def"));
    kids.push_back(field(expect_name(), "name"));
    kids.push_back(field(parameters(false), "parameters"));
    if (at_op("->")) {
      kids.push_back(leaf());
      kids.push_back(field(expression(), "return_type"));
    }
    kids.push_back(expect_op(":"));
    kids.push_back(field(block(), "body"));
    return make("function_definition", std::move(kids));
  }

  NodeId class_definition() {
    std::vector<NodeId> kids;
    kids.push_back(expect_kw("class"));
    kids.push_back(field(expect_name(), "name"));
    if (at_op("(")) kids.push_back(field(argument_list(), "superclasses"));
    kids.push_back(expect_op(":"));
    kids.push_back(field(block(), "body"));
    return make("class_definition", std::move(kids));
  }

  NodeId decorated_definition() {
    std::vector<NodeId> kids;
    while (at_op("@")) {
      std::vector<NodeId> dk;
      dk.push_back(leaf());
      dk.push_back(named_expression());
      expect_newline();
      kids.push_back(make("decorator", std::move(dk)));
    }
    if (at_kw("def") || (at_kw("async") && is_kw(peek(), "def"))) {
      kids.push_back(field(function_definition(), "definition"));
    } else if (at_kw("class")) {
      kids.push_back(field(class_definition(), "definition"));
    } else {
      fail();
    }
    return make("decorated_definition", std::move(kids));
  }

  NodeId parameters(bool lambda) {
    std::vector<NodeId> kids;
    if (!lambda) kids.push_back(expect_op("("));
    auto at_end = [&] { return lambda ? at_op(":") : at_op(")"); };
    while (!at_end()) {
      if (at_op("/")) {
        kids.push_back(make("positional_separator", {leaf()}));
      } else if (at_op("*")) {
        if (is_op(peek(), ",") || is_op(peek(), ")") || is_op(peek(), ":")) {
          kids.push_back(make("keyword_separator", {leaf()}));
        } else {
          std::vector<NodeId> pk{leaf(), expect_name()};
          NodeId splat = make("list_splat_pattern", std::move(pk));
          kids.push_back(annotated(splat, lambda, false));
        }
      } else if (at_op("**")) {
        std::vector<NodeId> pk{leaf(), expect_name()};
        NodeId splat = make("dictionary_splat_pattern", std::move(pk));
        kids.push_back(annotated(splat, lambda, false));
      } else {
        kids.push_back(annotated(expect_name(), lambda, true));
      }
      if (!at_op(",")) break;
      kids.push_back(leaf());
    }
    if (!lambda) kids.push_back(expect_op(")"));
    return make(lambda ? "lambda_parameters" : "parameters", std::move(kids));
  }

  NodeId annotated(NodeId name, bool lambda, bool allow_default) {
    std::vector<NodeId> k{field(name, "name")};
    bool typed = false;
    if (!lambda && at_op(":")) {
      k.push_back(leaf());
      k.push_back(field(make("type", {expression()}), "type"));
      typed = true;
    }
    if (allow_default && at_op("=")) {
      k.push_back(leaf());
      k.push_back(field(expression(), "value"));
      return make(typed ? "typed_default_parameter" : "default_parameter", std::move(k));
    }
    if (!typed) {
      arena_[name].field = {};
      return name;
    }
    return make("typed_parameter", std::move(k));
  }

  NodeId match_statement() {
    std::vector<NodeId> kids;
    kids.push_back(leaf_as("match", false));
    kids.push_back(field(star_named_expressions(), "subject"));
    kids.push_back(expect_op(":"));
    expect_newline();
    if (!at(TokenKind::Indent)) fail();
    ++pos_;
    std::vector<NodeId> cases;
    while (at(TokenKind::Name) && cur().text == "case") {
      std::vector<NodeId> ck;
      ck.push_back(leaf_as("case", false));
      while (true) {
        std::vector<NodeId> pk;
        if (at_op("*")) {
          pk.push_back(leaf());
          pk.push_back(expect_name());
        } else {
          in_pattern_ = true;
          try {
            pk.push_back(expression());
          } catch (const ParseFail&) {
            in_pattern_ = false;
            throw;
          }
          in_pattern_ = false;
        }
        ck.push_back(field(make("case_pattern", std::move(pk)), "pattern"));
        if (!at_op(",")) break;
        ck.push_back(leaf());
        if (at_kw("if") || at_op(":")) break;
      }
      if (at_kw("if")) {
        std::vector<NodeId> gk{leaf(), named_expression()};
        ck.push_back(field(make("if_clause", std::move(gk)), "guard"));
      }
      ck.push_back(expect_op(":"));
      ck.push_back(field(block(), "consequence"));
      cases.push_back(make("case_clause", std::move(ck)));
    }
    if (cases.empty() || !at(TokenKind::Dedent)) fail();
    ++pos_;
    kids.push_back(field(make("block", std::move(cases)), "body"));
    return make("match_statement", std::move(kids));
  }

  NodeId small_statement() {
    const Token& t = cur();
    if (t.kind == TokenKind::Keyword) {
      if (t.text == "pass") return make("pass_statement", {leaf()});
      if (t.text == "break") return make("break_statement", {leaf()});
      if (t.text == "continue") return make("continue_statement", {leaf()});
      if (t.text == "return") {
        std::vector<NodeId> k{leaf()};
        if (!at(TokenKind::Newline) && !at_op(";")) k.push_back(field(star_expressions(), "value"));
        return make("return_statement", std::move(k));
      }
      if (t.text == "raise") {
        std::vector<NodeId> k{leaf()};
        if (!at(TokenKind::Newline) && !at_op(";")) {
          k.push_back(field(expression(), "value"));
          if (at_kw("from")) {
            k.push_back(leaf());
            k.push_back(field(expression(), "cause"));
          }
        }
        return make("raise_statement", std::move(k));
      }
      if (t.text == "global" || t.text == "nonlocal") {
        const std::string_view kind = t.text == "global" ? "global_statement" : "nonlocal_statement";
        std::vector<NodeId> k{leaf(), expect_name()};
        while (at_op(",")) {
          k.push_back(leaf());
          k.push_back(expect_name());
        }
        return make(kind, std::move(k));
      }
      if (t.text == "del") {
        std::vector<NodeId> k{leaf(), star_expressions()};
        return make("delete_statement", std::move(k));
      }
      if (t.text == "assert") {
        std::vector<NodeId> k{leaf(), expression()};
        if (at_op(",")) {
          k.push_back(leaf());
          k.push_back(expression());
        }
        return make("assert_statement", std::move(k));
      }
      if (t.text == "import") return import_statement();
      if (t.text == "from") return import_from_statement();
    }
    return expression_statement();
  }

  NodeId dotted_name() {
    std::vector<NodeId> k{expect_name()};
    while (at_op(".")) {
      k.push_back(leaf());
      k.push_back(expect_name());
    }
    return make("dotted_name", std::move(k));
  }

  NodeId import_statement() {
    std::vector<NodeId> k{leaf()};
    while (true) {
      NodeId name = dotted_name();
      if (at_kw("as")) {
        std::vector<NodeId> ak{field(name, "name"), leaf(), field(expect_name(), "alias")};
        name = make("aliased_import", std::move(ak));
      }
      k.push_back(field(name, "name"));
      if (!at_op(",")) break;
      k.push_back(leaf());
    }
    return make("import_statement", std::move(k));
  }

  NodeId import_from_statement() {
    std::vector<NodeId> k{leaf()};
    if (at_op(".") || at_op("...")) {
      std::vector<NodeId> rk;
      while (at_op(".") || at_op("...")) rk.push_back(leaf());
      if (at(TokenKind::Name)) rk.push_back(dotted_name());
      k.push_back(field(make("relative_import", std::move(rk)), "module_name"));
    } else {
      k.push_back(field(dotted_name(), "module_name"));
    }
    k.push_back(expect_kw("import"));
    if (at_op("*")) {
      k.push_back(make("wildcard_import", {leaf()}));
      return make("import_from_statement", std::move(k));
    }
    const bool paren = at_op("(");
    if (paren) k.push_back(leaf());
    while (true) {
      NodeId name = make("dotted_name", {expect_name()});
      if (at_kw("as")) {
        std::vector<NodeId> ak{field(name, "name"), leaf(), field(expect_name(), "alias")};
        name = make("aliased_import", std::move(ak));
      }
      k.push_back(field(name, "name"));
      if (!at_op(",")) break;
      k.push_back(leaf());
      if (paren && at_op(")")) break;
    }
    if (paren) k.push_back(expect_op(")"));
    return make("import_from_statement", std::move(k));
  }

  NodeId expression_statement() {
    NodeId first = at_kw("yield") ? yield_expr() : star_expressions();
    if (at_op(":")) {
      std::vector<NodeId> k{field(first, "left"), leaf()};
      k.push_back(field(make("type", {expression()}), "type"));
      if (at_op("=")) {
        k.push_back(leaf());
        k.push_back(field(at_kw("yield") ? yield_expr() : star_expressions(), "right"));
      }
      return make("expression_statement", {make("assignment", std::move(k))});
    }
    if (cur().kind == TokenKind::Op && is_augassign(cur().text)) {
      std::vector<NodeId> k{field(first, "left"), leaf()};
      k.push_back(field(at_kw("yield") ? yield_expr() : star_expressions(), "right"));
      return make("expression_statement", {make("augmented_assignment", std::move(k))});
    }
    if (at_op("=")) {
      std::vector<NodeId> parts{first};
      std::vector<NodeId> eqs;
      while (at_op("=")) {
        eqs.push_back(leaf());
        parts.push_back(at_kw("yield") ? yield_expr() : star_expressions());
      }
      NodeId rhs = parts.back();
      for (std::size_t i = parts.size() - 1; i-- > 0;) {
        std::vector<NodeId> k{field(parts[i], "left"), eqs[i], field(rhs, "right")};
        rhs = make("assignment", std::move(k));
      }
      return make("expression_statement", {rhs});
    }
    return make("expression_statement", {first});
  }

  // ---- expressions ---------------------------------------------------------

  NodeId yield_expr() {
    std::vector<NodeId> k{expect_kw("yield")};
    if (at_kw("from")) {
      k.push_back(leaf());
      k.push_back(expression());
    } else if (starts_expression()) {
      k.push_back(star_expressions());
    }
    return make("yield", std::move(k));
  }

  bool starts_expression() const {
    const Token& t = cur();
    switch (t.kind) {
      case TokenKind::Name:
      case TokenKind::Number:
      case TokenKind::String:
        return true;
      case TokenKind::Keyword:
        return t.text == "None" || t.text == "True" || t.text == "False" || t.text == "not" ||
               t.text == "lambda" || t.text == "await" || t.text == "yield";
      case TokenKind::Op:
        return t.text == "(" || t.text == "[" || t.text == "{" || t.text == "-" ||
               t.text == "+" || t.text == "~" || t.text == "*" || t.text == "...";
      default:
        return false;
    }
  }

  // Comma-separated list that becomes an expression_list when a comma occurs.
  template <typename Item>
  NodeId comma_list(Item item, std::string_view list_kind) {
    NodeId first = item();
    if (!at_op(",")) return first;
    std::vector<NodeId> k{first};
    while (at_op(",")) {
      k.push_back(leaf());
      if (!starts_expression() || at_kw("yield")) break;
      k.push_back(item());
    }
    return make(list_kind, std::move(k));
  }

  NodeId star_expressions() {
    return comma_list([this] { return star_expression(); }, "expression_list");
  }

  NodeId star_named_expressions() {
    return comma_list([this] { return star_named_expression(); }, "expression_list");
  }

  NodeId star_expression() {
    if (at_op("*")) {
      std::vector<NodeId> k{leaf(), bitor_expr()};
      return make("list_splat", std::move(k));
    }
    return expression();
  }

  NodeId star_named_expression() {
    if (at_op("*")) {
      std::vector<NodeId> k{leaf(), bitor_expr()};
      return make("list_splat", std::move(k));
    }
    return named_expression();
  }

  NodeId star_target() {
    if (at_op("*")) {
      std::vector<NodeId> k{leaf(), star_target()};
      return make("list_splat_pattern", std::move(k));
    }
    return bitor_expr();
  }

  NodeId target_list() {
    return comma_list([this] { return star_target(); }, "pattern_list");
  }

  NodeId named_expression() {
    if (at(TokenKind::Name) && is_op(peek(), ":=")) {
      std::vector<NodeId> k{field(leaf(), "name"), leaf()};
      k.push_back(field(expression(), "value"));
      return make("named_expression", std::move(k));
    }
    return expression();
  }

  NodeId expression() {
    if (at_kw("lambda")) return lambda_expr();
    NodeId body = disjunction();
    if (in_pattern_) {
      if (!at_kw("as")) return body;
      std::vector<NodeId> k{body, leaf(), expect_name()};
      return make("as_pattern", std::move(k));
    }
    if (!at_kw("if")) return body;
    std::vector<NodeId> k{body, leaf(), disjunction(), expect_kw("else"), expression()};
    return make("conditional_expression", std::move(k));
  }

  NodeId lambda_expr() {
    std::vector<NodeId> k{leaf()};
    if (!at_op(":")) k.push_back(field(parameters(true), "parameters"));
    k.push_back(expect_op(":"));
    k.push_back(field(expression(), "body"));
    return make("lambda", std::move(k));
  }

  NodeId boolean_chain(std::string_view op, NodeId (Parser::*operand)()) {
    NodeId left = (this->*operand)();
    while (at_kw(op)) {
      std::vector<NodeId> k{field(left, "left"), field(leaf(), "operator")};
      k.push_back(field((this->*operand)(), "right"));
      left = make("boolean_operator", std::move(k));
    }
    return left;
  }

  NodeId disjunction() { return boolean_chain("or", &Parser::conjunction); }
  NodeId conjunction() { return boolean_chain("and", &Parser::inversion); }

  NodeId inversion() {
    if (at_kw("not")) {
      std::vector<NodeId> k{leaf()};
      k.push_back(field(inversion(), "argument"));
      return make("not_operator", std::move(k));
    }
    return comparison();
  }

  NodeId comparison() {
    NodeId first = bitor_expr();
    std::vector<NodeId> k{first};
    while (true) {
      const Token& t = cur();
      if (t.kind == TokenKind::Op &&
          (t.text == "<" || t.text == ">" || t.text == "==" || t.text == ">=" ||
           t.text == "<=" || t.text == "!=")) {
        k.push_back(leaf());
      } else if (is_kw(t, "in")) {
        k.push_back(leaf());
      } else if (is_kw(t, "not") && is_kw(peek(), "in")) {
        k.push_back(leaf());
        k.push_back(leaf());
      } else if (is_kw(t, "is")) {
        k.push_back(leaf());
        if (at_kw("not")) k.push_back(leaf());
      } else {
        break;
      }
      k.push_back(bitor_expr());
    }
    if (k.size() == 1) return first;
    return make("comparison_operator", std::move(k));
  }

  NodeId binary_chain(std::initializer_list<std::string_view> ops, NodeId (Parser::*operand)()) {
    NodeId left = (this->*operand)();
    while (cur().kind == TokenKind::Op &&
           std::find(ops.begin(), ops.end(), cur().text) != ops.end()) {
      std::vector<NodeId> k{field(left, "left"), field(leaf(), "operator")};
      k.push_back(field((this->*operand)(), "right"));
      left = make("binary_operator", std::move(k));
    }
    return left;
  }

  NodeId bitor_expr() { return binary_chain({"|"}, &Parser::bitxor_expr); }
  NodeId bitxor_expr() { return binary_chain({"^"}, &Parser::bitand_expr); }
  NodeId bitand_expr() { return binary_chain({"&"}, &Parser::shift_expr); }
  NodeId shift_expr() { return binary_chain({"<<", ">>"}, &Parser::sum_expr); }
  NodeId sum_expr() { return binary_chain({"+", "-"}, &Parser::term_expr); }
  NodeId term_expr() { return binary_chain({"*", "/", "//", "%", "@"}, &Parser::factor); }

  NodeId factor() {
    if (at_op("+") || at_op("-") || at_op("~")) {
      std::vector<NodeId> k{field(leaf(), "operator")};
      k.push_back(field(factor(), "argument"));
      return make("unary_operator", std::move(k));
    }
    return power();
  }

  NodeId power() {
    NodeId base = await_primary();
    if (!at_op("**")) return base;
    std::vector<NodeId> k{field(base, "left"), field(leaf(), "operator")};
    k.push_back(field(factor(), "right"));
    return make("binary_operator", std::move(k));
  }

  NodeId await_primary() {
    if (at_kw("await")) {
      std::vector<NodeId> k{leaf(), primary()};
      return make("await", std::move(k));
    }
    return primary();
  }

  NodeId primary() {
    NodeId node = atom();
    while (true) {
      if (at_op("(")) {
        std::vector<NodeId> k{field(node, "function")};
        k.push_back(field(argument_list(), "arguments"));
        node = make("call", std::move(k));
      } else if (at_op("[")) {
        std::vector<NodeId> k{field(node, "value"), leaf()};
        while (!at_op("]")) {
          k.push_back(field(slice_or_expression(), "subscript"));
          if (!at_op(",")) break;
          k.push_back(leaf());
        }
        k.push_back(expect_op("]"));
        node = make("subscript", std::move(k));
      } else if (at_op(".")) {
        std::vector<NodeId> k{field(node, "object"), leaf()};
        k.push_back(field(expect_name(), "attribute"));
        node = make("attribute", std::move(k));
      } else {
        return node;
      }
    }
  }

  NodeId slice_or_expression() {
    std::vector<NodeId> k;
    if (!at_op(":")) {
      NodeId e = star_named_expression();
      if (!at_op(":")) return e;
      k.push_back(e);
    }
    k.push_back(leaf());  // ':'
    if (!at_op(":") && !at_op(",") && !at_op("]")) k.push_back(expression());
    if (at_op(":")) {
      k.push_back(leaf());
      if (!at_op(",") && !at_op("]")) k.push_back(expression());
    }
    return make("slice", std::move(k));
  }

  NodeId argument_list() {
    std::vector<NodeId> k{expect_op("(")};
    while (!at_op(")")) {
      if (at_op("*")) {
        std::vector<NodeId> sk{leaf(), expression()};
        k.push_back(make("list_splat", std::move(sk)));
      } else if (at_op("**")) {
        std::vector<NodeId> sk{leaf(), expression()};
        k.push_back(make("dictionary_splat", std::move(sk)));
      } else if (at(TokenKind::Name) && is_op(peek(), "=")) {
        std::vector<NodeId> kk{field(leaf(), "name"), leaf()};
        kk.push_back(field(expression(), "value"));
        k.push_back(make("keyword_argument", std::move(kk)));
      } else {
        NodeId e = named_expression();
        if (at_comprehension()) e = comprehension("generator_expression", e, {});
        k.push_back(e);
      }
      if (!at_op(",")) break;
      k.push_back(leaf());
    }
    k.push_back(expect_op(")"));
    return make("argument_list", std::move(k));
  }

  bool at_comprehension() const {
    return at_kw("for") || (at_kw("async") && is_kw(peek(), "for"));
  }

  // Builds `kind` from already-parsed element nodes plus the for/if clauses
  // that follow them. `prefix` holds any opening bracket leaf.
  NodeId comprehension(std::string_view kind, NodeId body, std::vector<NodeId> prefix) {
    std::vector<NodeId> k = std::move(prefix);
    k.push_back(field(body, "body"));
    while (at_comprehension()) {
      std::vector<NodeId> fk;
      if (at_kw("async")) fk.push_back(leaf());
      fk.push_back(leaf());
      fk.push_back(field(target_list(), "left"));
      fk.push_back(expect_kw("in"));
      fk.push_back(field(disjunction(), "right"));
      k.push_back(make("for_in_clause", std::move(fk)));
      while (at_kw("if")) {
        std::vector<NodeId> ik{leaf(), disjunction()};
        k.push_back(make("if_clause", std::move(ik)));
      }
    }
    return make(kind, std::move(k));
  }

  NodeId atom() {
    const Token& t = cur();
    switch (t.kind) {
      case TokenKind::Name:
      case TokenKind::Number:
        return leaf();
      case TokenKind::String: {
        NodeId first = leaf();
        if (!at(TokenKind::String)) return first;
        std::vector<NodeId> k{first};
        while (at(TokenKind::String)) k.push_back(leaf());
        return make("concatenated_string", std::move(k));
      }
      case TokenKind::Keyword:
        if (t.text == "None" || t.text == "True" || t.text == "False") return leaf();
        fail();
      case TokenKind::Op:
        if (t.text == "(") return paren_atom();
        if (t.text == "[") return list_atom();
        if (t.text == "{") return brace_atom();
        if (t.text == "...") return make("ellipsis", {leaf()});
        fail();
      default:
        fail();
    }
  }

  NodeId paren_atom() {
    NodeId open = leaf();
    if (at_op(")")) return make("tuple", {open, leaf()});
    if (at_kw("yield")) {
      std::vector<NodeId> k{open, yield_expr(), expect_op(")")};
      return make("parenthesized_expression", std::move(k));
    }
    NodeId first = star_named_expression();
    if (at_comprehension()) {
      NodeId g = comprehension("generator_expression", first, {open});
      const NodeId close = expect_op(")");
      arena_[g].kids.push_back(close);
      arena_[g].span.end = arena_[arena_[g].kids.back()].span.end;
      return g;
    }
    if (at_op(")")) {
      std::vector<NodeId> k{open, first, leaf()};
      return make("parenthesized_expression", std::move(k));
    }
    std::vector<NodeId> k{open, first};
    while (at_op(",")) {
      k.push_back(leaf());
      if (at_op(")")) break;
      k.push_back(star_named_expression());
    }
    k.push_back(expect_op(")"));
    return make("tuple", std::move(k));
  }

  NodeId list_atom() {
    NodeId open = leaf();
    if (at_op("]")) return make("list", {open, leaf()});
    NodeId first = star_named_expression();
    if (at_comprehension()) {
      NodeId c = comprehension("list_comprehension", first, {open});
      const NodeId close = expect_op("]");
      arena_[c].kids.push_back(close);
      arena_[c].span.end = arena_[arena_[c].kids.back()].span.end;
      return c;
    }
    std::vector<NodeId> k{open, first};
    while (at_op(",")) {
      k.push_back(leaf());
      if (at_op("]")) break;
      k.push_back(star_named_expression());
    }
    k.push_back(expect_op("]"));
    return make("list", std::move(k));
  }

  NodeId dict_item(bool& is_dict) {
    if (at_op("**")) {
      is_dict = true;
      std::vector<NodeId> k{leaf(), bitor_expr()};
      return make("dictionary_splat", std::move(k));
    }
    NodeId key = star_named_expression();
    if (at_op(":")) {
      is_dict = true;
      std::vector<NodeId> k{field(key, "key"), leaf()};
      k.push_back(field(expression(), "value"));
      return make("pair", std::move(k));
    }
    return key;
  }

  NodeId brace_atom() {
    NodeId open = leaf();
    if (at_op("}")) return make("dictionary", {open, leaf()});
    bool is_dict = false;
    NodeId first = dict_item(is_dict);
    if (at_comprehension()) {
      NodeId c = comprehension(is_dict ? "dictionary_comprehension" : "set_comprehension", first,
                               {open});
      const NodeId close = expect_op("}");
      arena_[c].kids.push_back(close);
      arena_[c].span.end = arena_[arena_[c].kids.back()].span.end;
      return c;
    }
    const bool first_is_dict = is_dict;
    std::vector<NodeId> k{open, first};
    while (at_op(",")) {
      k.push_back(leaf());
      if (at_op("}")) break;
      bool item_dict = false;
      k.push_back(dict_item(item_dict));
      // A set display cannot contain pairs and vice versa.
      if (item_dict != first_is_dict) fail();
    }
    k.push_back(expect_op("}"));
    return make(first_is_dict ? "dictionary" : "set", std::move(k));
  }

  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<BuildNode> arena_;
  bool in_pattern_ = false;
};

std::vector<std::uint32_t> compute_line_starts(std::string_view s) {
  std::vector<std::uint32_t> starts{0};
  for (std::uint32_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\n') starts.push_back(i + 1);
  }
  return starts;
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnreadableSource: return "UnreadableSource";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::Ambiguous: return "Ambiguous";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::ReplayMiss: return "ReplayMiss";
    case ErrorCode::SandboxCrash: return "SandboxCrash";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

SyntaxTree parse_source(std::string_view source_text) {
  if (!is_valid_utf8(source_text)) {
    throw Error(ErrorCode::UnreadableSource, "source text is not valid UTF-8");
  }
  auto storage = std::make_shared<detail::TreeStorage>();
  storage->source.assign(source_text);
  const std::string_view src = storage->source;

  Parser parser(src, tokenize_python(src));
  const NodeId root = parser.parse_module();
  std::vector<BuildNode> arena = parser.take_arena();

  storage->nodes.resize(arena.size());
  for (NodeId id = 0; id < arena.size(); ++id) {
    BuildNode& b = arena[id];
    detail::NodeRecord& r = storage->nodes[id];
    r.kind = b.kind;
    r.field = b.field;
    r.span = b.span;
    r.named = b.named;
    r.first_child = static_cast<std::uint32_t>(storage->child_ids.size());
    r.child_count = static_cast<std::uint32_t>(b.kids.size());
    for (NodeId kid : b.kids) storage->child_ids.push_back(kid);
    if (b.kind == "ERROR") ++storage->error_count;
  }
  for (NodeId id = 0; id < arena.size(); ++id) {
    for (NodeId kid : arena[id].kids) storage->nodes[kid].parent = id;
  }
  storage->root = root;
  storage->line_starts = compute_line_starts(src);
  return SyntaxTree(std::move(storage));
}

bool check_parses(std::string_view code) {
  if (!is_valid_utf8(code)) return false;
  try {
    return !parse_source(code).has_errors();
  } catch (...) {
    return false;
  }
}

}  // namespace pathprompt
