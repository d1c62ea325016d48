#pragma once

#include <string>
#include <string_view>

#include "pathprompt/errors.hpp"

namespace pathprompt {

/// Whole-file read in binary mode; throws Error{code} if it cannot be opened.
std::string read_file(const std::string& path, ErrorCode code = ErrorCode::InvalidInput);

/// Writes via a temporary sibling and rename, creating parent directories.
void write_file(const std::string& path, std::string_view contents);

}  // namespace pathprompt
