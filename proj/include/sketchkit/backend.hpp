#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "sketchkit/model.hpp"

namespace sketchkit {

enum class SamplingMode { Greedy, Nucleus };

struct SamplingConfig {
  SamplingMode mode = SamplingMode::Greedy;
  double temperature = 0.0;
  double top_p = 1.0;
  double frequency_penalty = 0.0;
  double presence_penalty = 0.0;
  int max_tokens = 4096;

  static SamplingConfig greedy() { return {}; }
  static SamplingConfig nucleus() { return {SamplingMode::Nucleus, 0.2, 0.9, 0.35, 0.25, 4096}; }

  /// Greedy decoding pins temperature to 0 and top_p to 1.
  SamplingConfig normalized() const;
  /// Throws DomainError on out-of-range fields.
  void validate() const;
};

struct CompletionRequest {
  Stage stage = Stage::RepoSketcher;
  std::string target;  // informational; not part of the request key
  std::string prompt;
  SamplingConfig sampling;
};

struct TokenUsage {
  long prompt_tokens = 0;
  long completion_tokens = 0;
};

struct CompletionResult {
  std::string text;
  TokenUsage usage;
  double latency_ms = 0.0;
};

std::string sha256_hex(std::string_view data);

/// Hex SHA-256 over the stage tag, prompt bytes and sampling fields.
std::string request_hash(const CompletionRequest& request);

class Backend {
 public:
  virtual ~Backend() = default;
  /// Throws BackendTimeout, BackendHttpError or ReplayMiss.
  virtual CompletionResult complete(const CompletionRequest& request) = 0;
  virtual int max_concurrency() const { return 1; }
};

struct HttpConfig {
  std::string endpoint = "http://127.0.0.1:8000/v1/chat/completions";
  std::string api_key_env = "OPENAI_API_KEY";
  std::string model = "default";
  double timeout_s = 60.0;
  int max_concurrency = 4;
  int max_retries = 3;
  double backoff_base_s = 1.0;
};

/// Reads a JSON config file (missing keys keep defaults), then applies
/// SKETCHKIT_ENDPOINT, SKETCHKIT_API_KEY_ENV, SKETCHKIT_MODEL,
/// SKETCHKIT_TIMEOUT and SKETCHKIT_MAX_CONCURRENCY. Throws IoError.
HttpConfig load_http_config(const std::filesystem::path& path);
void apply_env_overrides(HttpConfig& config);

/// Chat-completion client: one user message per request; retries on
/// timeouts, 429 and 5xx with exponential backoff.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpConfig config);
  CompletionResult complete(const CompletionRequest& request) override;
  int max_concurrency() const override { return config_.max_concurrency; }

 private:
  HttpConfig config_;
  std::string scheme_host_;
  std::string path_;
};

/// Answers from a JSON-lines archive of {hash, stage, prompt_sha, text}.
class ReplayBackend : public Backend {
 public:
  /// A missing archive file starts empty. Throws IoError on malformed lines.
  explicit ReplayBackend(std::filesystem::path archive);
  CompletionResult complete(const CompletionRequest& request) override;
  int max_concurrency() const override { return 8; }

  /// Appends an entry; later entries for the same key win. Throws IoError.
  void record(const CompletionRequest& request, const CompletionResult& result);
  std::size_t size() const;

 private:
  std::filesystem::path archive_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, std::string> entries_;
};

/// Appends one entry to an archive file. Throws IoError.
void record(const CompletionRequest& request, const CompletionResult& result,
            const std::filesystem::path& archive);

/// Answers through a callback; useful for building fixtures.
class ScriptedBackend : public Backend {
 public:
  using Script = std::function<std::string(const CompletionRequest&)>;
  explicit ScriptedBackend(Script script) : script_(std::move(script)) {}
  CompletionResult complete(const CompletionRequest& request) override;

 private:
  Script script_;
};

/// Forwards to another backend and records every answer.
class RecordingBackend : public Backend {
 public:
  RecordingBackend(Backend& inner, std::filesystem::path archive)
      : inner_(inner), archive_(std::move(archive)) {}
  CompletionResult complete(const CompletionRequest& request) override;
  int max_concurrency() const override { return inner_.max_concurrency(); }

 private:
  Backend& inner_;
  std::filesystem::path archive_;
  std::mutex mutex_;
};

}  // namespace sketchkit
