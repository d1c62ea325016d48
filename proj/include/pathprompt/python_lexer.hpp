#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pathprompt/syntax_tree.hpp"

namespace pathprompt {

enum class TokenKind : std::uint8_t {
  Name,
  Keyword,
  Number,
  String,
  Op,
  Newline,
  Indent,
  Dedent,
  EndMarker,
  Error,
};

struct Token {
  TokenKind kind;
  Span span;
  std::string_view text;  // view into the lexed source
  std::string_view error; // diagnostic for TokenKind::Error
};

bool is_python_keyword(std::string_view word);

/// Tokenizes Python 3 source following the reference tokenizer's
/// layout rules: implicit line joining inside brackets, backslash
/// continuation, INDENT/DEDENT synthesis. Comments and blank lines are
/// dropped. Malformed input yields TokenKind::Error tokens, never throws.
std::vector<Token> tokenize_python(std::string_view source);

/// True iff every byte sequence in `text` is well-formed UTF-8.
bool is_valid_utf8(std::string_view text);

/// Re-joins the tokens covering `span` of `source`, dropping comments and
/// collapsing any inter-token gap to a single space.
std::string normalize_code_fragment(std::string_view source, Span span);

}  // namespace pathprompt
