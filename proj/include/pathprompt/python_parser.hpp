#pragma once

#include <string_view>

#include "pathprompt/syntax_tree.hpp"

namespace pathprompt {

/// Parses Python 3 source into a concrete syntax tree. Statement-level
/// syntax errors are localized into ERROR nodes; parsing always completes.
/// Throws Error{UnreadableSource} when the text is not valid UTF-8.
SyntaxTree parse_source(std::string_view source_text);

/// True iff `code` parses with zero ERROR nodes. Never throws.
bool check_parses(std::string_view code);

}  // namespace pathprompt
