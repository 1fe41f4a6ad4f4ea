#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dmind/probe_record.hpp"
#include "dmind/prompt.hpp"

namespace dmind {

// One generated answer as reported by a provider.
struct Completion {
  std::string text;
  int output_tokens = 1;  // provider-reported completion tokens, clamped >= 1
  double latency_ms = 0.0;
  bool truncated = false;         // stop reason was the output-token cap
  bool tokens_estimated = false;  // usage missing, estimated from text length
};

struct BackendConfig {
  std::string endpoint_url;  // e.g. http://host:8000/v1/chat/completions
  std::string model_id;
  std::string api_key_env;  // name of the env var holding the key
  int timeout_ms = 30000;
  int max_retries = 2;
  int retry_base_delay_ms = 100;
  int max_in_flight = 8;
};

// Ties a request to its question so scripted backends can key on it.
struct RequestKey {
  std::string question_id;
};

class Backend {
 public:
  virtual ~Backend() = default;

  // Thread safe. Throws TransportError once retries are exhausted,
  // RequestError on non-retryable rejections.
  virtual Completion complete(const PromptBundle& bundle,
                              const RequestKey& key = {}) = 0;
};

// ---------------------------------------------------------------------------
// Scripted mock: deterministic (question_id, mode) -> reply table.

struct MockReply {
  std::string text;
  int output_tokens = 1;
};

using MockScript = std::map<std::pair<std::string, ThinkingMode>, MockReply>;

class MockBackend : public Backend {
 public:
  explicit MockBackend(MockScript script);

  Completion complete(const PromptBundle& bundle, const RequestKey& key) override;

  int call_count() const;
  std::vector<PromptBundle> requests() const;  // copies, for assertions

 private:
  MockScript script_;
  mutable std::mutex mu_;
  std::vector<PromptBundle> requests_;
};

// Empty script -> InputError.
std::unique_ptr<MockBackend> make_mock_backend(MockScript script);

// ---------------------------------------------------------------------------
// Replay: serves run i of a recorded log on the i-th request, cycling after k.

class ReplayBackend : public Backend {
 public:
  explicit ReplayBackend(std::vector<ProbeRecord> log);

  Completion complete(const PromptBundle& bundle, const RequestKey& key) override;

 private:
  struct Entry {
    std::vector<RunResult> runs;
    std::size_t next = 0;
  };
  std::map<std::pair<std::string, ThinkingMode>, Entry> entries_;
  std::mutex mu_;
};

// Requires stored run text (probe with text storage on) -> ContractError
// otherwise.
std::unique_ptr<ReplayBackend> make_replay_backend(std::vector<ProbeRecord> log);

// ---------------------------------------------------------------------------
// Live chat-completions client with a transport seam for testing.

struct HttpResult {
  bool transport_ok = false;  // false: connect/timeout class failure
  int status = 0;
  std::string body;
  std::string error;
};

using HttpTransport =
    std::function<HttpResult(const BackendConfig& config, const std::string& body)>;

// POSTs JSON to config.endpoint_url via cpp-httplib, bearer auth from
// config.api_key_env when set.
HttpTransport default_http_transport();

class HttpBackend : public Backend {
 public:
  explicit HttpBackend(BackendConfig config,
                       HttpTransport transport = default_http_transport());

  Completion complete(const PromptBundle& bundle, const RequestKey& key) override;

 private:
  BackendConfig config_;
  HttpTransport transport_;
  std::counting_semaphore<4096> slots_;
};

// Chat-completions wire format shared with the service proxy.
nlohmann::json chat_completion_request(const PromptBundle& bundle,
                                       const std::string& model_id);
Completion parse_chat_completion(const nlohmann::json& body);

// Fallback when usage is missing: ceil(character length / 4), at least 1.
int estimate_output_tokens(std::string_view text);

}  // namespace dmind
