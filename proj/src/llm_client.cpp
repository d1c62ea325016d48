#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "pathprompt/llm_client.hpp"

#include <openssl/evp.h>

#include <cstdlib>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "pathprompt/errors.hpp"
#include "pathprompt/file_io.hpp"

namespace pathprompt {

std::vector<std::string> default_stop_sequences() { return {"\ndef ", "\nclass "}; }

void CompletionRequest::validate() const {
  if (max_tokens < 1) throw Error(ErrorCode::InvalidInput, "max_tokens must be at least 1");
  if (!(temperature >= 0)) throw Error(ErrorCode::InvalidInput, "temperature must be non-negative");
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("EVP_Digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string truncate_at_stop(std::string_view text, const std::vector<std::string>& stops) {
  std::size_t cut = text.size();
  for (const auto& s : stops) {
    if (s.empty()) continue;
    cut = std::min(cut, text.find(s));
  }
  return std::string(text.substr(0, cut));
}

// --- replay ---------------------------------------------------------------

ReplayBackend ReplayBackend::from_jsonl(std::string_view jsonl) {
  ReplayBackend out;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      std::optional<std::int64_t> seed;
      if (j.contains("seed") && !j.at("seed").is_null()) seed = j.at("seed").get<std::int64_t>();
      out.add(j.at("prompt_sha256").get<std::string>(), j.at("completion").get<std::string>(), seed);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InvalidInput,
                  "replay fixture line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

ReplayBackend ReplayBackend::from_file(const std::string& path) {
  return from_jsonl(read_file(path, ErrorCode::BackendUnavailable));
}

void ReplayBackend::add(std::string prompt_sha256, std::string completion,
                        std::optional<std::int64_t> seed) {
  table_[std::move(prompt_sha256)].push_back({seed, std::move(completion)});
}

std::size_t ReplayBackend::size() const {
  std::size_t n = 0;
  for (const auto& [_, v] : table_) n += v.size();
  return n;
}

std::string ReplayBackend::complete(const CompletionRequest& req) {
  req.validate();
  const std::string key = sha256_hex(req.prompt_text);
  const auto it = table_.find(key);
  if (it != table_.end()) {
    std::vector<const std::string*> unpinned;
    for (const Entry& e : it->second) {
      if (!e.seed) unpinned.push_back(&e.completion);
      else if (e.seed == req.seed) return truncate_at_stop(e.completion, req.stop_sequences);
    }
    if (!unpinned.empty()) {
      const std::uint64_t seed = req.seed ? static_cast<std::uint64_t>(*req.seed) : 0;
      return truncate_at_stop(*unpinned[seed % unpinned.size()], req.stop_sequences);
    }
  }
  throw Error(ErrorCode::ReplayMiss, "no replay entry for prompt sha256 " + key);
}

// --- http -----------------------------------------------------------------

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  const std::string& url = config_.base_url;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::InvalidConfig, "endpoint '" + url + "' must start with http:// or https://");
  }
  const auto path_begin = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_begin);
  path_prefix_ = path_begin == std::string::npos ? "" : url.substr(path_begin);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

std::string HttpBackend::complete(const CompletionRequest& req) {
  req.validate();
  nlohmann::json body{{"max_tokens", req.max_tokens}, {"temperature", req.temperature}};
  if (!config_.model.empty()) body["model"] = config_.model;
  if (!req.stop_sequences.empty()) body["stop"] = req.stop_sequences;
  if (req.seed) body["seed"] = *req.seed;
  if (config_.chat) {
    body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", req.prompt_text}}});
  } else {
    body["prompt"] = req.prompt_text;
  }

  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }

  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);
  const std::string path = path_prefix_ + (config_.chat ? "/chat/completions" : "/completions");
  auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorCode::BackendUnavailable, "request to " + scheme_host_port_ + path +
                                                   " failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(ErrorCode::BackendUnavailable,
                "backend returned HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
  }
  try {
    const auto j = nlohmann::json::parse(res->body);
    const auto& choice = j.at("choices").at(0);
    const auto& content = config_.chat ? choice.at("message").at("content") : choice.at("text");
    const std::string text = content.is_null() ? std::string() : content.get<std::string>();
    // Servers do not all honor `stop`; enforce it here as well.
    return truncate_at_stop(text, req.stop_sequences);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BackendUnavailable, std::string("malformed backend response: ") + e.what());
  }
}

// --- recording ------------------------------------------------------------

std::string RecordingBackend::complete(const CompletionRequest& req) {
  std::string out = inner_.complete(req);
  std::lock_guard lock(mu_);
  records_.push_back({sha256_hex(req.prompt_text), req.seed, out});
  return out;
}

std::string RecordingBackend::to_jsonl() const {
  std::lock_guard lock(mu_);
  std::string out;
  for (const Record& r : records_) {
    nlohmann::json j{{"prompt_sha256", r.prompt_sha256}, {"completion", r.completion}};
    if (r.seed) j["seed"] = *r.seed;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace pathprompt
