#include "pathprompt/config.hpp"

#include <charconv>
#include <filesystem>
#include <sstream>

#include "pathprompt/errors.hpp"
#include "pathprompt/file_io.hpp"
#include "pathprompt/prompt_builder.hpp"

namespace pathprompt {

namespace {

[[noreturn]] void bad(std::size_t lineno, const std::string& what) {
  throw Error(ErrorCode::InvalidConfig, "config line " + std::to_string(lineno) + ": " + what);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Strips a trailing comment that is not inside quotes, then quotes.
std::string unquote(std::string_view raw, std::size_t lineno) {
  raw = trim(raw);
  if (!raw.empty() && (raw.front() == '"' || raw.front() == '\'')) {
    const char q = raw.front();
    std::string out;
    std::size_t i = 1;
    for (; i < raw.size() && raw[i] != q; ++i) {
      if (raw[i] == '\\' && q == '"' && i + 1 < raw.size()) {
        const char c = raw[++i];
        out += c == 'n' ? '\n' : c == 't' ? '\t' : c;
      } else {
        out += raw[i];
      }
    }
    if (i == raw.size()) bad(lineno, "unterminated string");
    const std::string_view rest = trim(raw.substr(i + 1));
    if (!rest.empty() && rest.front() != '#') bad(lineno, "trailing characters after string");
    return out;
  }
  if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = trim(raw.substr(0, hash));
  return std::string(raw);
}

template <typename T>
T number(const std::string& v, std::size_t lineno, std::string_view key) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    bad(lineno, "'" + std::string(key) + "' expects a number, got '" + v + "'");
  }
  return out;
}

bool boolean(const std::string& v, std::size_t lineno, std::string_view key) {
  if (v == "true") return true;
  if (v == "false") return false;
  bad(lineno, "'" + std::string(key) + "' expects true or false, got '" + v + "'");
}

}  // namespace

void Config::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidConfig, m); };
  if (backend != "replay" && backend != "http-chat" && backend != "http-completion") {
    fail("backend must be replay, http-chat or http-completion, not '" + backend + "'");
  }
  if (samples < 1) fail("samples must be at least 1");
  if (!(temperature >= 0)) fail("temperature must be non-negative");
  if (max_tokens < 1) fail("max_tokens must be at least 1");
  if (!(timeout > 0) || !(suite_timeout > 0)) fail("timeouts must be positive");
  if (template_version != kTemplateVersion) {
    fail("template_version " + std::to_string(template_version) + " is not supported (this build renders version " +
         std::to_string(kTemplateVersion) + ")");
  }
}

Config parse_config(std::string_view text) {
  Config c;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    if (s.front() == '[') continue;  // section headers are accepted and ignored
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) bad(lineno, "expected key = value");
    const std::string key(trim(s.substr(0, eq)));
    const std::string v = unquote(s.substr(eq + 1), lineno);
    if (key == "backend") c.backend = v;
    else if (key == "endpoint") c.endpoint = v;
    else if (key == "replay_fixture") c.replay_fixture = v;
    else if (key == "model") c.model = v;
    else if (key == "api_key_env") c.api_key_env = v;
    else if (key == "samples") c.samples = number<std::size_t>(v, lineno, key);
    else if (key == "max_paths") c.max_paths = number<std::size_t>(v, lineno, key);
    else if (key == "token_budget") c.token_budget = number<std::size_t>(v, lineno, key);
    else if (key == "temperature") c.temperature = number<double>(v, lineno, key);
    else if (key == "max_tokens") c.max_tokens = number<int>(v, lineno, key);
    else if (key == "template_version") c.template_version = number<int>(v, lineno, key);
    else if (key == "strict_parity") c.strict_parity = boolean(v, lineno, key);
    else if (key == "timeout") c.timeout = number<double>(v, lineno, key);
    else if (key == "suite_timeout") c.suite_timeout = number<double>(v, lineno, key);
    else if (key == "sandbox_command") c.sandbox_command = v;
    else if (key == "recorded_results") c.recorded_results = v;
    else if (key == "repo_root") c.repo_root = v;
    else bad(lineno, "unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

Config load_config(const std::string& path) {
  Config c = parse_config(read_file(path, ErrorCode::InvalidConfig));
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  for (std::string* p : {&c.replay_fixture, &c.recorded_results, &c.repo_root}) {
    if (!p->empty() && std::filesystem::path(*p).is_relative()) *p = (base / *p).lexically_normal().string();
  }
  return c;
}

std::vector<std::string> split_command(std::string_view command) {
  std::vector<std::string> out;
  std::string cur;
  bool in_token = false;
  char quote = 0;
  for (const char c : command) {
    if (quote) {
      if (c == quote) quote = 0;
      else cur += c;
    } else if (c == '\'' || c == '"') {
      quote = c;
      in_token = true;
    } else if (c == ' ' || c == '\t' || c == '\n') {
      if (in_token) out.push_back(std::move(cur));
      cur.clear();
      in_token = false;
    } else {
      cur += c;
      in_token = true;
    }
  }
  if (in_token) out.push_back(std::move(cur));
  return out;
}

}  // namespace pathprompt
