#pragma once

#include <string>

#include "pathprompt/file_io.hpp"
#include "pathprompt/focal_method.hpp"
#include "pathprompt/python_parser.hpp"

namespace testsupport {

inline std::string fixture_path(const std::string& rel) { return std::string(PATHPROMPT_FIXTURES) + "/" + rel; }

inline std::string read_fixture(const std::string& rel) { return pathprompt::read_file(fixture_path(rel)); }

/// Parses `source` and locates `name`; the tree stays alive inside the result.
inline pathprompt::FocalMethod focal_in(const std::string& source, const std::string& name,
                                        const std::string& file = "m.py") {
  return pathprompt::locate_focal_method(pathprompt::parse_source(source), name, file);
}

inline pathprompt::FocalMethod corpus_focal(const std::string& rel, const std::string& name) {
  return focal_in(read_fixture("corpus/" + rel), name, fixture_path("corpus/" + rel));
}

}  // namespace testsupport
