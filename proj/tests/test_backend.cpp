#include <atomic>
#include <cstdlib>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "sketchkit/backend.hpp"
#include "sketchkit/errors.hpp"
#include "support.hpp"

using namespace sketchkit;
using testsupport::TempDir;
namespace fs = std::filesystem;

namespace {

CompletionRequest request(std::string prompt, Stage stage = Stage::RepoSketcher) {
  return CompletionRequest{stage, "t", std::move(prompt), SamplingConfig::greedy()};
}

CompletionResult text(std::string t) {
  CompletionResult r;
  r.text = std::move(t);
  return r;
}

// Routes the default logger into a string for the lifetime of the object.
class CapturedLog {
 public:
  CapturedLog() : previous_(spdlog::default_logger()) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(stream_);
    spdlog::set_default_logger(std::make_shared<spdlog::logger>("capture", sink));
  }
  ~CapturedLog() { spdlog::set_default_logger(previous_); }
  std::string str() const { return stream_.str(); }

 private:
  std::ostringstream stream_;
  std::shared_ptr<spdlog::logger> previous_;
};

// A local chat-completion endpoint with a scripted status sequence.
class MockServer {
 public:
  explicit MockServer(std::vector<int> statuses, int delay_ms = 0) : statuses_(std::move(statuses)) {
    server_.Post("/v1/chat/completions", [this, delay_ms](const httplib::Request& req, httplib::Response& res) {
      std::size_t i = calls_++;
      last_body_ = req.body;
      last_auth_ = req.get_header_value("Authorization");
      if (delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
      int status = i < statuses_.size() ? statuses_[i] : 200;
      res.status = status;
      if (status == 200) {
        res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"app\n└── main.py"}}],)"
                        R"("usage":{"prompt_tokens":12,"completion_tokens":5}})",
                        "application/json");
      } else {
        res.set_content(R"({"error":"busy"})", "application/json");
      }
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockServer() {
    server_.stop();
    thread_.join();
  }

  HttpConfig config() const {
    HttpConfig c;
    c.endpoint = "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
    c.api_key_env = "SKETCHKIT_TEST_KEY";
    c.backoff_base_s = 0.01;
    c.timeout_s = 2.0;
    return c;
  }
  std::size_t calls() const { return calls_; }
  std::string last_body() const { return last_body_; }
  std::string last_auth() const { return last_auth_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  std::vector<int> statuses_;
  std::atomic<std::size_t> calls_{0};
  std::string last_body_;
  std::string last_auth_;
  int port_ = 0;
};

}  // namespace

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(RequestHash, CoversStagePromptAndSampling) {
  CompletionRequest a = request("p");
  CompletionRequest b = a;
  b.target = "other";
  EXPECT_EQ(request_hash(a), request_hash(b));
  b.stage = Stage::FileSketcher;
  EXPECT_NE(request_hash(a), request_hash(b));
  CompletionRequest c = a;
  c.sampling = SamplingConfig::nucleus();
  EXPECT_NE(request_hash(a), request_hash(c));
  CompletionRequest d = a;
  d.prompt = "q";
  EXPECT_NE(request_hash(a), request_hash(d));
  CompletionRequest e = a;
  e.sampling.temperature = 0.7;  // greedy decoding ignores it
  EXPECT_EQ(request_hash(a), request_hash(e));
  EXPECT_EQ(request_hash(a).size(), 64u);
}

TEST(Sampling, DefaultsAndValidation) {
  SamplingConfig n = SamplingConfig::nucleus();
  EXPECT_DOUBLE_EQ(n.temperature, 0.2);
  EXPECT_DOUBLE_EQ(n.top_p, 0.9);
  EXPECT_DOUBLE_EQ(n.frequency_penalty, 0.35);
  EXPECT_DOUBLE_EQ(n.presence_penalty, 0.25);
  EXPECT_EQ(n.max_tokens, 4096);
  EXPECT_NO_THROW(n.validate());
  n.temperature = 0.0;
  EXPECT_THROW(n.validate(), DomainError);
  SamplingConfig g;
  g.top_p = 0.0;
  EXPECT_THROW(g.validate(), DomainError);
  EXPECT_NO_THROW(g.normalized().validate());
  g.max_tokens = 0;
  EXPECT_THROW(g.validate(), DomainError);
}

TEST(Replay, LookupAndMiss) {
  TempDir dir;
  fs::path archive = dir / "a.jsonl";
  record(request("p"), text("app\n└── main.py"), archive);
  ReplayBackend replay(archive);
  EXPECT_EQ(replay.complete(request("p")).text, "app\n└── main.py");
  try {
    replay.complete(request("missing"));
    FAIL();
  } catch (const ReplayMiss& e) {
    EXPECT_EQ(e.hash(), request_hash(request("missing")));
    EXPECT_NE(std::string(e.what()).find(e.hash()), std::string::npos);
  }
}

TEST(Replay, MissingArchiveIsEmpty) {
  TempDir dir;
  ReplayBackend replay(dir / "none.jsonl");
  EXPECT_EQ(replay.size(), 0u);
  EXPECT_THROW(replay.complete(request("p")), ReplayMiss);
}

TEST(Replay, RecordThenComplete) {
  TempDir dir;
  ReplayBackend replay(dir / "a.jsonl");
  replay.record(request("p"), text("one"));
  EXPECT_EQ(replay.complete(request("p")).text, "one");
  EXPECT_EQ(ReplayBackend(dir / "a.jsonl").complete(request("p")).text, "one");
}

TEST(Replay, LastWriterWinsWithWarning) {
  TempDir dir;
  CapturedLog log;
  ReplayBackend replay(dir / "a.jsonl");
  replay.record(request("p"), text("one"));
  replay.record(request("p"), text("two"));
  EXPECT_EQ(replay.complete(request("p")).text, "two");
  EXPECT_NE(log.str().find("new entry wins"), std::string::npos);
  ReplayBackend reloaded(dir / "a.jsonl");
  EXPECT_EQ(reloaded.complete(request("p")).text, "two");
  EXPECT_EQ(reloaded.size(), 1u);
  EXPECT_NE(log.str().find("duplicate entry"), std::string::npos);
}

TEST(Replay, UnwritableArchive) {
  TempDir dir;
  fs::create_directories(dir / "is_a_dir");
  EXPECT_THROW(record(request("p"), text("x"), dir / "is_a_dir"), IoError);
  EXPECT_THROW(record(request("p"), text("x"), dir / "no/such/dir/a.jsonl"), IoError);
}

TEST(Replay, MalformedArchive) {
  TempDir dir;
  testsupport::write_file(dir / "bad.jsonl", "{not json\n");
  EXPECT_THROW(ReplayBackend(dir / "bad.jsonl"), IoError);
}

TEST(Replay, ConcurrentReads) {
  TempDir dir;
  ReplayBackend replay(dir / "a.jsonl");
  for (int i = 0; i < 50; ++i) replay.record(request("p" + std::to_string(i)), text("r" + std::to_string(i)));
  std::atomic<int> ok{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 50; ++i) {
        if (replay.complete(request("p" + std::to_string(i))).text == "r" + std::to_string(i)) ++ok;
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(ok, 400);
}

TEST(Scripted, RecordingForwardsAndRecords) {
  TempDir dir;
  ScriptedBackend scripted([](const CompletionRequest& r) { return "echo " + r.prompt; });
  RecordingBackend recording(scripted, dir / "a.jsonl");
  EXPECT_EQ(recording.complete(request("hi")).text, "echo hi");
  EXPECT_EQ(ReplayBackend(dir / "a.jsonl").complete(request("hi")).text, "echo hi");
}

TEST(HttpConfigFile, FileThenEnvironment) {
  TempDir dir;
  testsupport::write_file(dir / "c.json",
                          R"({"endpoint":"http://h:1/x","model":"m","timeout":5,"max_concurrency":2,"max_retries":1})");
  HttpConfig c = load_http_config(dir / "c.json");
  EXPECT_EQ(c.endpoint, "http://h:1/x");
  EXPECT_EQ(c.model, "m");
  EXPECT_DOUBLE_EQ(c.timeout_s, 5.0);
  EXPECT_EQ(c.max_concurrency, 2);
  EXPECT_EQ(c.max_retries, 1);
  EXPECT_EQ(c.api_key_env, "OPENAI_API_KEY");
  ::setenv("SKETCHKIT_MODEL", "override", 1);
  ::setenv("SKETCHKIT_MAX_CONCURRENCY", "9", 1);
  HttpConfig o = load_http_config(dir / "c.json");
  ::unsetenv("SKETCHKIT_MODEL");
  ::unsetenv("SKETCHKIT_MAX_CONCURRENCY");
  EXPECT_EQ(o.model, "override");
  EXPECT_EQ(o.max_concurrency, 9);
  EXPECT_THROW(load_http_config(dir / "missing.json"), IoError);
}

TEST(Http, RetriesThrice429ThenSucceeds) {
  MockServer server({429, 429, 429});
  ::setenv("SKETCHKIT_TEST_KEY", "secret", 1);
  HttpBackend backend(server.config());
  CompletionResult r = backend.complete(request("hello"));
  ::unsetenv("SKETCHKIT_TEST_KEY");
  EXPECT_EQ(r.text, "app\n└── main.py");
  EXPECT_EQ(server.calls(), 4u);
  EXPECT_GT(r.latency_ms, 0.0);
  EXPECT_EQ(r.usage.prompt_tokens, 12);
  EXPECT_EQ(r.usage.completion_tokens, 5);
  EXPECT_EQ(server.last_auth(), "Bearer secret");
  auto body = nlohmann::json::parse(server.last_body());
  EXPECT_EQ(body["messages"].size(), 1u);
  EXPECT_EQ(body["messages"][0]["content"], "hello");
  EXPECT_EQ(body["temperature"], 0.0);
}

TEST(Http, GivesUpAfterRetryBudget) {
  MockServer server({503, 503, 503, 503, 503});
  HttpBackend backend(server.config());
  try {
    backend.complete(request("hello"));
    FAIL();
  } catch (const BackendHttpError& e) {
    EXPECT_EQ(e.status(), 503);
  }
  EXPECT_EQ(server.calls(), 4u);
}

TEST(Http, ClientErrorsAreNotRetried) {
  MockServer server({400});
  HttpBackend backend(server.config());
  try {
    backend.complete(request("hello"));
    FAIL();
  } catch (const BackendHttpError& e) {
    EXPECT_EQ(e.status(), 400);
  }
  EXPECT_EQ(server.calls(), 1u);
}

TEST(Http, Timeout) {
  MockServer server({}, 600);
  HttpConfig c = server.config();
  c.timeout_s = 0.1;
  c.max_retries = 1;
  HttpBackend backend(c);
  auto start = std::chrono::steady_clock::now();
  EXPECT_THROW(backend.complete(request("hello")), BackendTimeout);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(3));
}

TEST(Http, ConnectionRefused) {
  HttpConfig c;
  c.endpoint = "http://127.0.0.1:1/v1/chat/completions";
  c.timeout_s = 1.0;
  HttpBackend backend(c);
  try {
    backend.complete(request("hello"));
    FAIL();
  } catch (const BackendHttpError& e) {
    EXPECT_EQ(e.status(), 0);
  }
}

TEST(Http, RejectsRelativeEndpoint) {
  HttpConfig c;
  c.endpoint = "localhost:8000";
  EXPECT_THROW(HttpBackend{c}, BackendError);
}
