#include "pathprompt/python_lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace pathprompt {

namespace {

constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",   "True",    "and",      "as",       "assert", "async",
    "await", "break",  "class",   "continue", "def",      "del",    "elif",
    "else",  "except", "finally", "for",      "from",     "global", "if",
    "import", "in",    "is",      "lambda",   "nonlocal", "not",    "or",
    "pass",  "raise",  "return",  "try",      "while",    "with",   "yield",
};

// Longest operators first so a greedy prefix match is correct.
constexpr std::array<std::string_view, 47> kOperators = {
    "**=", "//=", ">>=", "<<=", "...", "->", ":=", "**", "//", "<<", ">>", "<=",
    ">=",  "==",  "!=",  "+=",  "-=",  "*=", "/=", "%=", "&=", "|=", "^=", "@=",
    "(",   ")",   "[",   "]",   "{",   "}",  ",",  ":",  ";",  ".",  "+",  "-",
    "*",   "/",   "%",   "&",   "|",   "^",  "~",  "<",  ">",  "=",  "@",
};

bool is_ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c >= 0x80;
}

bool is_ident_char(unsigned char c) {
  return is_ident_start(c) || (c >= '0' && c <= '9');
}

bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

bool is_string_prefix(std::string_view p) {
  if (p.size() > 2) return false;
  std::string lower;
  for (char c : p) lower.push_back(static_cast<char>(c | 0x20));
  return lower == "r" || lower == "u" || lower == "b" || lower == "f" || lower == "br" ||
         lower == "rb" || lower == "fr" || lower == "rf";
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    indents_.push_back(0);
    at_line_start_ = true;
    while (pos_ < src_.size()) {
      if (at_line_start_ && depth_ == 0) {
        if (!handle_indentation()) continue;
      }
      if (pos_ >= src_.size()) break;
      const unsigned char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\f') {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n' && src_[pos_] != '\r') ++pos_;
      } else if (c == '\r' || c == '\n') {
        const std::uint32_t start = pos_;
        consume_newline();
        if (depth_ == 0 && line_has_tokens_) {
          emit(TokenKind::Newline, start, pos_);
          line_has_tokens_ = false;
        }
        at_line_start_ = depth_ == 0;
      } else if (c == '\\') {
        const std::uint32_t start = pos_;
        ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == '\n' || src_[pos_] == '\r')) {
          consume_newline();
        } else {
          emit_error(start, pos_, "unexpected character after line continuation");
        }
      } else {
        lex_token();
        line_has_tokens_ = true;
      }
    }
    const auto end = static_cast<std::uint32_t>(src_.size());
    if (line_has_tokens_) emit(TokenKind::Newline, end, end);
    while (indents_.size() > 1) {
      indents_.pop_back();
      emit(TokenKind::Dedent, end, end);
    }
    emit(TokenKind::EndMarker, end, end);
    return std::move(tokens_);
  }

 private:
  void consume_newline() {
    if (src_[pos_] == '\r' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') ++pos_;
    ++pos_;
  }

  // Returns false when the line was blank/comment-only and has been skipped.
  bool handle_indentation() {
    std::uint32_t col = 0;
    std::uint32_t p = pos_;
    while (p < src_.size()) {
      const char c = src_[p];
      if (c == ' ') {
        ++col;
      } else if (c == '\t') {
        col = (col / 8 + 1) * 8;
      } else if (c == '\f') {
        col = 0;
      } else {
        break;
      }
      ++p;
    }
    if (p >= src_.size()) {
      pos_ = p;
      return false;
    }
    const char c = src_[p];
    if (c == '#' || c == '\n' || c == '\r') {
      pos_ = p;
      while (pos_ < src_.size() && src_[pos_] != '\n' && src_[pos_] != '\r') ++pos_;
      if (pos_ < src_.size()) consume_newline();
      return false;
    }
    if (c == '\\' && p + 1 < src_.size() && (src_[p + 1] == '\n' || src_[p + 1] == '\r')) {
      // Continuation on an otherwise empty line: indentation is taken from
      // the next physical line, matching CPython.
      pos_ = p + 1;
      consume_newline();
      return false;
    }
    at_line_start_ = false;
    pos_ = p;
    if (col > indents_.back()) {
      indents_.push_back(col);
      emit(TokenKind::Indent, p, p);
    } else {
      while (col < indents_.back()) {
        indents_.pop_back();
        emit(TokenKind::Dedent, p, p);
      }
      if (col != indents_.back()) {
        emit_error(p, p, "unindent does not match any outer indentation level");
      }
    }
    return true;
  }

  void lex_token() {
    const std::uint32_t start = pos_;
    const unsigned char c = src_[pos_];
    if (is_ident_start(c)) {
      while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
      std::string_view word = src_.substr(start, pos_ - start);
      if (pos_ < src_.size() && (src_[pos_] == '\'' || src_[pos_] == '"') &&
          is_string_prefix(word)) {
        lex_string(start);
        return;
      }
      emit(is_python_keyword(word) ? TokenKind::Keyword : TokenKind::Name, start, pos_);
      return;
    }
    if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
      lex_number(start);
      return;
    }
    if (c == '\'' || c == '"') {
      lex_string(start);
      return;
    }
    for (std::string_view op : kOperators) {
      if (src_.substr(pos_, op.size()) == op) {
        pos_ += static_cast<std::uint32_t>(op.size());
        if (op == "(" || op == "[" || op == "{") {
          ++depth_;
        } else if ((op == ")" || op == "]" || op == "}") && depth_ > 0) {
          --depth_;
        }
        emit(TokenKind::Op, start, pos_);
        return;
      }
    }
    // '!' is only meaningful inside f-string replacement fields, which are
    // lexed as part of the string token.
    ++pos_;
    while (pos_ < src_.size() && (static_cast<unsigned char>(src_[pos_]) & 0xC0) == 0x80) ++pos_;
    emit_error(start, pos_, "invalid character");
  }

  void lex_number(std::uint32_t start) {
    auto digits = [&](auto pred) {
      while (pos_ < src_.size() && (pred(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
    };
    if (src_[pos_] == '0' && pos_ + 1 < src_.size() &&
        std::string_view("xXoObB").find(src_[pos_ + 1]) != std::string_view::npos) {
      pos_ += 2;
      digits([](unsigned char ch) { return std::isxdigit(ch) != 0; });
    } else {
      digits(is_digit);
      if (pos_ < src_.size() && src_[pos_] == '.') {
        ++pos_;
        digits(is_digit);
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        std::uint32_t save = pos_;
        ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
        if (pos_ < src_.size() && is_digit(src_[pos_])) {
          digits(is_digit);
        } else {
          pos_ = save;
        }
      }
      if (pos_ < src_.size() && (src_[pos_] == 'j' || src_[pos_] == 'J')) ++pos_;
    }
    if (pos_ < src_.size() && is_ident_start(src_[pos_])) {
      while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
      emit_error(start, pos_, "invalid decimal literal");
      return;
    }
    emit(TokenKind::Number, start, pos_);
  }

  void lex_string(std::uint32_t start) {
    const char quote = src_[pos_];
    const bool triple = src_.substr(pos_, 3) == std::string(3, quote);
    pos_ += triple ? 3 : 1;
    while (pos_ < src_.size()) {
      const char ch = src_[pos_];
      if (ch == '\\') {
        pos_ += 2;
        continue;
      }
      if (triple) {
        if (src_.substr(pos_, 3) == std::string(3, quote)) {
          pos_ += 3;
          emit(TokenKind::String, start, pos_);
          return;
        }
      } else {
        if (ch == quote) {
          ++pos_;
          emit(TokenKind::String, start, pos_);
          return;
        }
        if (ch == '\n' || ch == '\r') break;
      }
      ++pos_;
    }
    pos_ = std::min<std::uint32_t>(pos_, static_cast<std::uint32_t>(src_.size()));
    emit_error(start, pos_, triple ? "unterminated triple-quoted string literal"
                                   : "unterminated string literal");
  }

  void emit(TokenKind kind, std::uint32_t b, std::uint32_t e) {
    tokens_.push_back(Token{kind, Span{b, e}, src_.substr(b, e - b), {}});
  }

  void emit_error(std::uint32_t b, std::uint32_t e, std::string_view why) {
    tokens_.push_back(Token{TokenKind::Error, Span{b, e}, src_.substr(b, e - b), why});
    line_has_tokens_ = true;
  }

  std::string_view src_;
  std::uint32_t pos_ = 0;
  int depth_ = 0;
  bool at_line_start_ = true;
  bool line_has_tokens_ = false;
  std::vector<std::uint32_t> indents_;
  std::vector<Token> tokens_;
};

}  // namespace

bool is_python_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<Token> tokenize_python(std::string_view source) { return Lexer(source).run(); }

bool is_valid_utf8(std::string_view text) {
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > n) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong encodings, surrogates and out-of-range code points.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
      return false;
    i += len;
  }
  return true;
}

std::string normalize_code_fragment(std::string_view source, Span span) {
  const std::string_view fragment = source.substr(span.begin, span.size());
  std::string out;
  std::uint32_t prev_end = 0;
  bool first = true;
  for (const Token& tok : tokenize_python(fragment)) {
    if (tok.kind == TokenKind::Newline || tok.kind == TokenKind::Indent ||
        tok.kind == TokenKind::Dedent || tok.kind == TokenKind::EndMarker)
      continue;
    if (!first && tok.span.begin > prev_end) out.push_back(' ');
    for (char ch : tok.text) {
      if (ch == '\n') {
        out += "\\n";
      } else if (ch != '\r') {
        out.push_back(ch);
      }
    }
    prev_end = tok.span.end;
    first = false;
  }
  return out;
}

}  // namespace pathprompt
