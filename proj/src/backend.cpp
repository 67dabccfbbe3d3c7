#include "sketchkit/backend.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "sketchkit/errors.hpp"

namespace sketchkit {
namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

const char* mode_name(SamplingMode mode) { return mode == SamplingMode::Greedy ? "greedy" : "nucleus"; }

std::mutex g_archive_write;

void append_entry(const std::filesystem::path& archive, const std::string& hash, const CompletionRequest& request,
                  const std::string& text) {
  json j;
  j["hash"] = hash;
  j["stage"] = stage_name(request.stage);
  j["prompt_sha"] = sha256_hex(request.prompt);
  j["text"] = text;
  std::lock_guard lock(g_archive_write);
  std::ofstream out(archive, std::ios::app | std::ios::binary);
  if (!out) throw IoError("cannot append to replay archive " + archive.string());
  out << j.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  out.flush();
  if (!out) throw IoError("write failed for replay archive " + archive.string());
}

}  // namespace

SamplingConfig SamplingConfig::normalized() const {
  SamplingConfig out = *this;
  if (mode == SamplingMode::Greedy) {
    out.temperature = 0.0;
    out.top_p = 1.0;
  }
  return out;
}

void SamplingConfig::validate() const {
  if (!(temperature >= 0.0)) throw DomainError("temperature must be >= 0");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw DomainError("top_p must lie in (0, 1]");
  if (max_tokens <= 0) throw DomainError("max_tokens must be positive");
  if (mode == SamplingMode::Nucleus && !(temperature > 0.0)) {
    throw DomainError("nucleus sampling requires temperature > 0");
  }
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
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

std::string request_hash(const CompletionRequest& request) {
  SamplingConfig s = request.sampling.normalized();
  json key = json::array({stage_name(request.stage), request.prompt,
                          {{"mode", mode_name(s.mode)},
                           {"temperature", s.temperature},
                           {"top_p", s.top_p},
                           {"frequency_penalty", s.frequency_penalty},
                           {"presence_penalty", s.presence_penalty},
                           {"max_tokens", s.max_tokens}}});
  return sha256_hex(key.dump(-1, ' ', false, json::error_handler_t::replace));
}

HttpConfig load_http_config(const std::filesystem::path& path) {
  HttpConfig config;
  std::ifstream in(path);
  if (!in) throw IoError("cannot read backend config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw IoError("malformed backend config " + path.string() + ": " + e.what());
  }
  config.endpoint = j.value("endpoint", config.endpoint);
  config.api_key_env = j.value("api_key_env", config.api_key_env);
  config.model = j.value("model", config.model);
  config.timeout_s = j.value("timeout", config.timeout_s);
  config.max_concurrency = j.value("max_concurrency", config.max_concurrency);
  config.max_retries = j.value("max_retries", config.max_retries);
  config.backoff_base_s = j.value("backoff_base", config.backoff_base_s);
  apply_env_overrides(config);
  return config;
}

void apply_env_overrides(HttpConfig& config) {
  auto env = [](const char* name) -> const char* {
    const char* v = std::getenv(name);
    return v && *v ? v : nullptr;
  };
  if (const char* v = env("SKETCHKIT_ENDPOINT")) config.endpoint = v;
  if (const char* v = env("SKETCHKIT_API_KEY_ENV")) config.api_key_env = v;
  if (const char* v = env("SKETCHKIT_MODEL")) config.model = v;
  if (const char* v = env("SKETCHKIT_TIMEOUT")) config.timeout_s = std::atof(v);
  if (const char* v = env("SKETCHKIT_MAX_CONCURRENCY")) config.max_concurrency = std::max(1, std::atoi(v));
}

HttpBackend::HttpBackend(HttpConfig config) : config_(std::move(config)) {
  const std::string& url = config_.endpoint;
  std::size_t scheme = url.find("://");
  if (scheme == std::string::npos) throw BackendError("endpoint must be an absolute URL: " + url);
  std::size_t slash = url.find('/', scheme + 3);
  scheme_host_ = url.substr(0, slash);
  path_ = slash == std::string::npos ? "/v1/chat/completions" : url.substr(slash);
}

CompletionResult HttpBackend::complete(const CompletionRequest& request) {
  SamplingConfig s = request.sampling.normalized();
  s.validate();
  json body = {{"model", config_.model},
               {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
               {"temperature", s.temperature},
               {"top_p", s.top_p},
               {"frequency_penalty", s.frequency_penalty},
               {"presence_penalty", s.presence_penalty},
               {"max_tokens", s.max_tokens}};
  std::string payload = body.dump(-1, ' ', false, json::error_handler_t::replace);
  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  auto started = Clock::now();
  auto timeout = std::chrono::duration<double>(config_.timeout_s);
  std::string last_error;
  int last_status = -1;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      double wait = config_.backoff_base_s * std::pow(2.0, attempt - 1);
      spdlog::warn("{} {}: retry {} in {:.2f}s after {}", stage_name(request.stage), request.target, attempt,
                   wait, last_error);
      std::this_thread::sleep_for(std::chrono::duration<double>(wait));
    }
    httplib::Client client(scheme_host_);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    httplib::Result res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      httplib::Error err = res.error();
      if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
        last_error = "timeout (" + httplib::to_string(err) + ")";
        last_status = -1;
        continue;
      }
      throw BackendHttpError(0, "request to " + config_.endpoint + " failed: " + httplib::to_string(err));
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      last_status = res->status;
      continue;
    }
    if (res->status != 200) {
      throw BackendHttpError(res->status, "HTTP " + std::to_string(res->status) + " from " + config_.endpoint);
    }
    CompletionResult result;
    try {
      json reply = json::parse(res->body);
      result.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
      if (reply.contains("usage")) {
        result.usage.prompt_tokens = reply["usage"].value("prompt_tokens", 0L);
        result.usage.completion_tokens = reply["usage"].value("completion_tokens", 0L);
      }
    } catch (const json::exception& e) {
      throw BackendHttpError(res->status, std::string("malformed completion response: ") + e.what());
    }
    if (result.text.empty()) throw BackendHttpError(res->status, "empty completion");
    result.latency_ms = elapsed_ms(started);
    return result;
  }
  if (last_status < 0) throw BackendTimeout("request to " + config_.endpoint + " timed out");
  throw BackendHttpError(last_status, "HTTP " + std::to_string(last_status) + " after " +
                                          std::to_string(config_.max_retries) + " retries");
}

ReplayBackend::ReplayBackend(std::filesystem::path archive) : archive_(std::move(archive)) {
  std::ifstream in(archive_, std::ios::binary);
  if (!in) return;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      std::string hash = j.at("hash").get<std::string>();
      auto [it, fresh] = entries_.insert_or_assign(hash, j.at("text").get<std::string>());
      if (!fresh) spdlog::warn("{}:{}: duplicate entry for {}; the later one wins", archive_.string(), lineno, hash);
    } catch (const json::exception& e) {
      throw IoError(archive_.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

CompletionResult ReplayBackend::complete(const CompletionRequest& request) {
  auto started = Clock::now();
  std::string hash = request_hash(request);
  std::shared_lock lock(mutex_);
  auto it = entries_.find(hash);
  if (it == entries_.end()) throw ReplayMiss(hash);
  CompletionResult result;
  result.text = it->second;
  result.latency_ms = elapsed_ms(started);
  return result;
}

void ReplayBackend::record(const CompletionRequest& request, const CompletionResult& result) {
  std::string hash = request_hash(request);
  std::unique_lock lock(mutex_);
  append_entry(archive_, hash, request, result.text);
  if (entries_.count(hash)) spdlog::warn("replay archive already holds {}; the new entry wins", hash);
  entries_[hash] = result.text;
}

std::size_t ReplayBackend::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

void record(const CompletionRequest& request, const CompletionResult& result, const std::filesystem::path& archive) {
  std::string hash = request_hash(request);
  if (std::ifstream in(archive, std::ios::binary); in) {
    std::string line;
    while (std::getline(in, line)) {
      json j = json::parse(line, nullptr, false);
      if (j.is_object() && j.value("hash", "") == hash) {
        spdlog::warn("replay archive already holds {}; the new entry wins", hash);
        break;
      }
    }
  }
  append_entry(archive, hash, request, result.text);
}

CompletionResult ScriptedBackend::complete(const CompletionRequest& request) {
  auto started = Clock::now();
  CompletionResult result;
  result.text = script_(request);
  result.latency_ms = elapsed_ms(started);
  return result;
}

CompletionResult RecordingBackend::complete(const CompletionRequest& request) {
  CompletionResult result = inner_.complete(request);
  std::lock_guard lock(mutex_);
  record(request, result, archive_);
  return result;
}

}  // namespace sketchkit
