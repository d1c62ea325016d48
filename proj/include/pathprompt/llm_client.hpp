#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pathprompt {

/// A new top-level `def`/`class` ends a single generated test function.
std::vector<std::string> default_stop_sequences();

struct CompletionRequest {
  std::string prompt_text;
  int max_tokens = 256;
  double temperature = 0.8;
  std::vector<std::string> stop_sequences = default_stop_sequences();
  std::optional<std::int64_t> seed;

  /// Throws Error{InvalidInput} unless max_tokens >= 1 and temperature >= 0.
  void validate() const;
};

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// Cuts `text` at the earliest occurrence of any stop sequence.
std::string truncate_at_stop(std::string_view text, const std::vector<std::string>& stops);

class Backend {
 public:
  virtual ~Backend() = default;
  /// Raw completion text after stop-sequence truncation. Empty completions
  /// are returned as "". Throws Error{BackendUnavailable} or Error{ReplayMiss}.
  virtual std::string complete(const CompletionRequest& req) = 0;
  virtual std::string_view kind() const = 0;
};

/// Completions looked up by the SHA-256 of the prompt text. An entry may pin
/// the request seed it answers; otherwise a hash may map to several
/// completions and the seed selects one (seed modulo count), so independent
/// samples can replay distinct transcripts.
class ReplayBackend final : public Backend {
 public:
  ReplayBackend() = default;
  /// Loads JSONL lines {"prompt_sha256": ..., "completion": ..., "seed"?: n}.
  static ReplayBackend from_jsonl(std::string_view jsonl);
  static ReplayBackend from_file(const std::string& path);

  void add(std::string prompt_sha256, std::string completion,
           std::optional<std::int64_t> seed = std::nullopt);
  std::size_t size() const;

  std::string complete(const CompletionRequest& req) override;
  std::string_view kind() const override { return "replay"; }

 private:
  struct Entry {
    std::optional<std::int64_t> seed;
    std::string completion;
  };
  std::map<std::string, std::vector<Entry>, std::less<>> table_;
};

struct HttpBackendConfig {
  /// Base URL up to and including the API version, e.g. "http://localhost:8000/v1".
  std::string base_url;
  std::string model;
  /// Name of the environment variable holding the bearer token; may be empty.
  std::string api_key_env;
  bool chat = true;
  int timeout_seconds = 120;
};

/// OpenAI-compatible /chat/completions or /completions endpoint.
class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config);
  std::string complete(const CompletionRequest& req) override;
  std::string_view kind() const override { return config_.chat ? "http-chat" : "http-completion"; }

 private:
  HttpBackendConfig config_;
  std::string scheme_host_port_;
  std::string path_prefix_;
};

/// Forwards to another backend and keeps a transcript usable as a replay
/// fixture.
class RecordingBackend final : public Backend {
 public:
  explicit RecordingBackend(Backend& inner) : inner_(inner) {}
  std::string complete(const CompletionRequest& req) override;
  std::string_view kind() const override { return inner_.kind(); }
  /// Transcript as JSONL, in request order.
  std::string to_jsonl() const;

 private:
  Backend& inner_;
  mutable std::mutex mu_;
  struct Record {
    std::string prompt_sha256;
    std::optional<std::int64_t> seed;
    std::string completion;
  };
  std::vector<Record> records_;
};

}  // namespace pathprompt
