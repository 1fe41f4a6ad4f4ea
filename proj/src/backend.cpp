#include "dmind/backend.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <random>
#include <thread>

#include "httplib.h"

#include "dmind/errors.hpp"

namespace dmind {

using nlohmann::json;

int estimate_output_tokens(std::string_view text) {
  auto estimated = static_cast<int>((text.size() + 3) / 4);
  return std::max(1, estimated);
}

// ---------------------------------------------------------------------------
// MockBackend

MockBackend::MockBackend(MockScript script) : script_(std::move(script)) {}

Completion MockBackend::complete(const PromptBundle& bundle, const RequestKey& key) {
  std::lock_guard lock(mu_);
  requests_.push_back(bundle);
  auto it = script_.find({key.question_id, bundle.mode});
  if (it == script_.end()) {
    throw ContractError("mock backend: no script entry for (" + key.question_id +
                        ", " + std::string{to_string(bundle.mode)} + ")");
  }
  const MockReply& reply = it->second;
  Completion completion;
  completion.text = reply.text;
  const int cap = bundle.generation.max_output_tokens;
  completion.truncated = reply.output_tokens > cap;
  completion.output_tokens = std::max(1, std::min(reply.output_tokens, cap));
  return completion;
}

int MockBackend::call_count() const {
  std::lock_guard lock(mu_);
  return static_cast<int>(requests_.size());
}

std::vector<PromptBundle> MockBackend::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

std::unique_ptr<MockBackend> make_mock_backend(MockScript script) {
  if (script.empty()) {
    throw InputError("mock backend script must not be empty");
  }
  return std::make_unique<MockBackend>(std::move(script));
}

// ---------------------------------------------------------------------------
// ReplayBackend

ReplayBackend::ReplayBackend(std::vector<ProbeRecord> log) {
  for (ProbeRecord& record : log) {
    for (const RunResult& run : record.runs) {
      if (!run.failed && !run.text) {
        throw ContractError("replay backend: log record for (" +
                            record.question_id + ", " +
                            std::string{to_string(record.mode)} +
                            ") lacks stored run text");
      }
    }
    Entry entry;
    entry.runs = std::move(record.runs);
    entries_[{record.question_id, record.mode}] = std::move(entry);
  }
}

Completion ReplayBackend::complete(const PromptBundle& bundle, const RequestKey& key) {
  std::lock_guard lock(mu_);
  auto it = entries_.find({key.question_id, bundle.mode});
  if (it == entries_.end() || it->second.runs.empty()) {
    throw ContractError("replay backend: no recorded runs for (" +
                        key.question_id + ", " +
                        std::string{to_string(bundle.mode)} + ")");
  }
  Entry& entry = it->second;
  const RunResult& run = entry.runs[entry.next % entry.runs.size()];
  entry.next++;
  if (run.failed) {
    throw TransportError("replay backend: recorded run failed");
  }
  Completion completion;
  completion.text = *run.text;
  completion.output_tokens = run.output_tokens;
  completion.truncated = run.truncated;
  return completion;
}

std::unique_ptr<ReplayBackend> make_replay_backend(std::vector<ProbeRecord> log) {
  return std::make_unique<ReplayBackend>(std::move(log));
}

// ---------------------------------------------------------------------------
// HttpBackend

json chat_completion_request(const PromptBundle& bundle, const std::string& model_id) {
  return json{{"model", model_id},
              {"messages",
               json::array({json{{"role", "system"}, {"content", bundle.system_message}},
                            json{{"role", "user"}, {"content", bundle.user_message}}})},
              {"temperature", bundle.generation.temperature},
              {"top_p", bundle.generation.top_p},
              {"max_tokens", bundle.generation.max_output_tokens}};
}

Completion parse_chat_completion(const json& body) {
  if (!body.contains("choices") || !body.at("choices").is_array() ||
      body.at("choices").empty()) {
    throw TransportError("chat completion response has no choices");
  }
  const json& choice = body.at("choices").at(0);
  Completion completion;
  if (choice.contains("message") && choice.at("message").contains("content") &&
      choice.at("message").at("content").is_string()) {
    completion.text = choice.at("message").at("content").get<std::string>();
  }
  completion.truncated = choice.value("finish_reason", std::string{}) == "length";

  if (body.contains("usage") && body.at("usage").contains("completion_tokens")) {
    completion.output_tokens = body.at("usage").at("completion_tokens").get<int>();
  } else {
    completion.output_tokens = estimate_output_tokens(completion.text);
    completion.tokens_estimated = true;
  }
  completion.output_tokens = std::max(1, completion.output_tokens);
  return completion;
}

namespace {

struct ParsedUrl {
  std::string scheme_host_port;  // e.g. "http://127.0.0.1:8000"
  std::string path;              // e.g. "/v1/chat/completions"
};

ParsedUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  std::size_t path_start = url.find('/', scheme_end == std::string::npos
                                             ? 0
                                             : scheme_end + 3);
  if (path_start == std::string::npos) {
    return {url, "/v1/chat/completions"};
  }
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpTransport default_http_transport() {
  return [](const BackendConfig& config, const std::string& body) -> HttpResult {
    ParsedUrl url = split_url(config.endpoint_url);
    httplib::Client client(url.scheme_host_port);
    client.set_connection_timeout(config.timeout_ms / 1000,
                                  (config.timeout_ms % 1000) * 1000);
    client.set_read_timeout(config.timeout_ms / 1000, (config.timeout_ms % 1000) * 1000);
    client.set_write_timeout(config.timeout_ms / 1000, (config.timeout_ms % 1000) * 1000);

    httplib::Headers headers;
    if (!config.api_key_env.empty()) {
      if (const char* key = std::getenv(config.api_key_env.c_str())) {
        headers.emplace("Authorization", std::string{"Bearer "} + key);
      }
    }
    auto res = client.Post(url.path, headers, body, "application/json");
    if (!res) {
      return {false, 0, "", httplib::to_string(res.error())};
    }
    return {true, res->status, res->body, ""};
  };
}

HttpBackend::HttpBackend(BackendConfig config, HttpTransport transport)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      slots_(std::max(1, config_.max_in_flight)) {
  if (config_.timeout_ms <= 0) throw ConfigError("timeout_ms must be > 0");
  if (config_.max_retries < 0) throw ConfigError("max_retries must be >= 0");
}

Completion HttpBackend::complete(const PromptBundle& bundle, const RequestKey&) {
  const std::string body = chat_completion_request(bundle, config_.model_id).dump();

  thread_local std::mt19937_64 jitter_rng{std::random_device{}()};
  std::string last_error;

  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      long long delay = static_cast<long long>(config_.retry_base_delay_ms)
                        << (attempt - 1);
      long long jitter = config_.retry_base_delay_ms > 0
                             ? static_cast<long long>(jitter_rng() %
                                                      static_cast<unsigned long long>(
                                                          config_.retry_base_delay_ms))
                             : 0;
      std::this_thread::sleep_for(std::chrono::milliseconds(delay + jitter));
    }

    struct SlotGuard {
      std::counting_semaphore<4096>& slots;
      ~SlotGuard() { slots.release(); }
    };
    slots_.acquire();
    SlotGuard guard{slots_};
    const auto start = std::chrono::steady_clock::now();
    HttpResult result = transport_(config_, body);
    const auto elapsed = std::chrono::steady_clock::now() - start;

    if (!result.transport_ok) {
      last_error = result.error.empty() ? "transport failure" : result.error;
      continue;
    }
    if (result.status == 429 || result.status >= 500) {
      last_error = "HTTP " + std::to_string(result.status);
      continue;
    }
    if (result.status >= 400) {
      throw RequestError("backend rejected request: HTTP " +
                         std::to_string(result.status) + " " + result.body);
    }

    json doc;
    try {
      doc = json::parse(result.body);
    } catch (const json::exception& e) {
      last_error = std::string{"bad response body: "} + e.what();
      continue;
    }
    Completion completion = parse_chat_completion(doc);
    completion.latency_ms =
        std::chrono::duration<double, std::milli>(elapsed).count();
    return completion;
  }

  throw TransportError("backend unreachable after " +
                       std::to_string(config_.max_retries + 1) + " attempts: " +
                       last_error);
}

}  // namespace dmind
