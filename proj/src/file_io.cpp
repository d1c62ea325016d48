#include "pathprompt/file_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace pathprompt {

std::string read_file(const std::string& path, ErrorCode code) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(code, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::InvalidInput, "cannot write '" + tmp.string() + "'");
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!f) throw Error(ErrorCode::InvalidInput, "short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

}  // namespace pathprompt
