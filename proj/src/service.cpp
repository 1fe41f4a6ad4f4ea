#include "dmind/service.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <semaphore>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "dmind/digest.hpp"
#include "dmind/errors.hpp"
#include "dmind/router.hpp"
#include "dmind/templates.hpp"

namespace dmind {

using nlohmann::json;

namespace {

// RFC 3986 unreserved characters pass through; header values must stay
// single-line, so everything else is %XX-encoded.
std::string percent_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    const bool unreserved = (u >= 'A' && u <= 'Z') || (u >= 'a' && u <= 'z') ||
                            (u >= '0' && u <= '9') || u == '-' || u == '.' ||
                            u == '_' || u == '~';
    if (unreserved) {
      out.push_back(c);
    } else {
      out.push_back('%');
      out.push_back(kHex[u >> 4]);
      out.push_back(kHex[u & 0xf]);
    }
  }
  return out;
}

void reply_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

std::string format_probability(double p) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", p);
  return buf;
}

struct SplitUrl {
  std::string host;  // scheme://host:port
  std::string path;
};

SplitUrl split_upstream_url(const std::string& url) {
  auto scheme_end = url.find("://");
  std::size_t path_start =
      url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  if (path_start == std::string::npos) {
    return {url, "/v1/chat/completions"};
  }
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

ServiceConfig load_service_config(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError("service config " + path.string() + ": " + e.what());
  }
  ServiceConfig config;
  config.listen_address = doc.value("listen_address", config.listen_address);
  config.port = doc.value("port", config.port);
  config.router_model_path = doc.value("router_model", std::string{});
  if (doc.contains("templates")) {
    config.templates_path = doc.at("templates").get<std::string>();
  }
  config.request_timeout_ms = doc.value("request_timeout_ms", config.request_timeout_ms);
  config.max_concurrent_requests =
      doc.value("max_concurrent_requests", config.max_concurrent_requests);
  if (config.max_concurrent_requests < 1) {
    throw ConfigError("max_concurrent_requests must be >= 1");
  }
  if (doc.contains("upstream")) {
    const json& u = doc.at("upstream");
    config.upstream.endpoint_url = u.value("endpoint_url", std::string{});
    config.upstream.model_id = u.value("model_id", std::string{});
    config.upstream.api_key_env = u.value("api_key_env", std::string{});
    config.upstream.timeout_ms = u.value("timeout_ms", config.upstream.timeout_ms);
    config.upstream.max_retries = u.value("max_retries", config.upstream.max_retries);
  }
  return config;
}

struct Service::Impl {
  explicit Impl(ServiceConfig cfg)
      : config(std::move(cfg)),
        upstream_slots(std::max(1, config.max_concurrent_requests)) {
    if (!config.router_model_path.empty()) {
      model = std::make_shared<const RouterModel>(
          load_router_model(config.router_model_path));
      digest = file_digest_hex(config.router_model_path);
    }
    templates = config.templates_path
                    ? load_template_set(std::filesystem::path{*config.templates_path})
                    : builtin_templates();
    setup_routes();
  }

  void setup_routes();
  void handle_route(const httplib::Request& req, httplib::Response& res);
  void handle_proxy(const httplib::Request& req, httplib::Response& res);
  void handle_health(const httplib::Request& req, httplib::Response& res);

  ServiceConfig config;
  std::shared_ptr<const RouterModel> model;
  TemplateSet templates;
  std::string digest;
  httplib::Server server;
  std::thread serve_thread;
  std::counting_semaphore<4096> upstream_slots;
  std::chrono::steady_clock::time_point started_at{};
  int bound_port = 0;
};

void Service::Impl::setup_routes() {
  server.new_task_queue = [] { return new httplib::ThreadPool(16); };
  server.set_read_timeout(config.request_timeout_ms / 1000,
                          (config.request_timeout_ms % 1000) * 1000);
  server.set_write_timeout(config.request_timeout_ms / 1000,
                           (config.request_timeout_ms % 1000) * 1000);

  server.Post("/route", [this](const httplib::Request& req, httplib::Response& res) {
    handle_route(req, res);
  });
  server.Post("/v1/chat/completions",
              [this](const httplib::Request& req, httplib::Response& res) {
                handle_proxy(req, res);
              });
  server.Get("/health", [this](const httplib::Request& req, httplib::Response& res) {
    handle_health(req, res);
  });
}

void Service::Impl::handle_route(const httplib::Request& req, httplib::Response& res) {
  if (!model) {
    reply_json(res, 503, json{{"error", "router model not loaded"}});
    return;
  }
  json doc;
  try {
    doc = json::parse(req.body);
  } catch (const json::exception&) {
    reply_json(res, 400, json{{"error", "request body is not valid JSON"}});
    return;
  }
  if (!doc.contains("question") || !doc.at("question").is_string() ||
      doc.at("question").get<std::string>().empty()) {
    reply_json(res, 400, json{{"error", "missing non-empty \"question\" field"}});
    return;
  }
  const Prediction prediction = predict(*model, doc.at("question").get<std::string>());
  reply_json(res, 200,
             json{{"mode", to_string(prediction.mode)},
                  {"probabilities",
                   json{{"fast", prediction.probabilities[0]},
                        {"normal", prediction.probabilities[1]},
                        {"slow", prediction.probabilities[2]}}}});
}

void Service::Impl::handle_proxy(const httplib::Request& req, httplib::Response& res) {
  if (!model) {
    reply_json(res, 503, json{{"error", "router model not loaded"}});
    return;
  }
  json doc;
  try {
    doc = json::parse(req.body);
  } catch (const json::exception&) {
    reply_json(res, 400, json{{"error", "request body is not valid JSON"}});
    return;
  }
  if (!doc.contains("messages") || !doc.at("messages").is_array()) {
    reply_json(res, 400, json{{"error", "missing \"messages\" array"}});
    return;
  }

  // Last user message is the question; the question text is never mutated.
  std::string question;
  bool found_user = false;
  std::optional<std::string> original_system;
  for (const json& message : doc.at("messages")) {
    const std::string role = message.value("role", "");
    if (role == "user" && message.contains("content") &&
        message.at("content").is_string()) {
      question = message.at("content").get<std::string>();
      found_user = true;
    } else if (role == "system" && !original_system &&
               message.contains("content") && message.at("content").is_string()) {
      original_system = message.at("content").get<std::string>();
    }
  }
  if (!found_user || question.empty()) {
    reply_json(res, 400, json{{"error", "request has no user message"}});
    return;
  }

  const Prediction prediction = predict(*model, question);
  const ThinkingMode mode = prediction.mode;
  const std::string& routed_template = templates.system_for(mode);

  json upstream_body = doc;
  json messages = json::array();
  messages.push_back(json{{"role", "system"}, {"content", routed_template}});
  for (const json& message : doc.at("messages")) {
    if (message.value("role", "") != "system") messages.push_back(message);
  }
  upstream_body["messages"] = std::move(messages);

  const int mode_cap = default_max_output_tokens(mode);
  int forwarded_cap = mode_cap;
  if (doc.contains("max_tokens") && doc.at("max_tokens").is_number()) {
    forwarded_cap = std::min(mode_cap, doc.at("max_tokens").get<int>());
  }
  upstream_body["max_tokens"] = forwarded_cap;
  if (!doc.contains("temperature")) upstream_body["temperature"] = 0.6;
  if (!doc.contains("top_p")) upstream_body["top_p"] = 0.9;
  if (!doc.contains("model") && !config.upstream.model_id.empty()) {
    upstream_body["model"] = config.upstream.model_id;
  }

  const SplitUrl url = split_upstream_url(config.upstream.endpoint_url);
  httplib::Headers headers;
  if (!config.upstream.api_key_env.empty()) {
    if (const char* key = std::getenv(config.upstream.api_key_env.c_str())) {
      headers.emplace("Authorization", std::string{"Bearer "} + key);
    }
  }

  httplib::Result upstream_res;
  {
    struct SlotGuard {
      std::counting_semaphore<4096>& slots;
      ~SlotGuard() { slots.release(); }
    };
    upstream_slots.acquire();
    SlotGuard guard{upstream_slots};
    httplib::Client client(url.host);
    client.set_connection_timeout(config.upstream.timeout_ms / 1000,
                                  (config.upstream.timeout_ms % 1000) * 1000);
    client.set_read_timeout(config.upstream.timeout_ms / 1000,
                            (config.upstream.timeout_ms % 1000) * 1000);
    upstream_res =
        client.Post(url.path, headers, upstream_body.dump(), "application/json");
  }

  res.set_header("X-DynamicMind-Mode", std::string{to_string(mode)});
  res.set_header("X-DynamicMind-Probabilities",
                 format_probability(prediction.probabilities[0]) + "," +
                     format_probability(prediction.probabilities[1]) + "," +
                     format_probability(prediction.probabilities[2]));
  if (original_system) {
    res.set_header("X-DynamicMind-Original-System", percent_encode(*original_system));
  }

  if (!upstream_res) {
    reply_json(res, 502,
               json{{"error",
                     json{{"message", "upstream request failed"},
                          {"detail", httplib::to_string(upstream_res.error())}}}});
    return;
  }
  if (upstream_res->status < 200 || upstream_res->status >= 300) {
    reply_json(res, 502,
               json{{"error",
                     json{{"message", "upstream error"},
                          {"upstream_status", upstream_res->status},
                          {"upstream_body", upstream_res->body}}}});
    return;
  }
  res.status = 200;
  res.set_content(upstream_res->body, "application/json");
}

void Service::Impl::handle_health(const httplib::Request&, httplib::Response& res) {
  const auto uptime_ms =
      started_at.time_since_epoch().count() == 0
          ? 0
          : std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - started_at)
                .count();
  if (!model) {
    reply_json(res, 503, json{{"status", "loading"}, {"uptime_ms", uptime_ms}});
    return;
  }
  reply_json(res, 200,
             json{{"status", "ok"},
                  {"model_digest", digest},
                  {"uptime_ms", uptime_ms}});
}

Service::Service(ServiceConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() { stop(); }

bool Service::start() {
  Impl& impl = *impl_;
  if (impl.config.port == 0) {
    impl.bound_port = impl.server.bind_to_any_port(impl.config.listen_address);
    if (impl.bound_port <= 0) return false;
  } else {
    if (!impl.server.bind_to_port(impl.config.listen_address, impl.config.port)) {
      return false;
    }
    impl.bound_port = impl.config.port;
  }
  impl.started_at = std::chrono::steady_clock::now();
  impl.serve_thread = std::thread([this] { impl_->server.listen_after_bind(); });
  for (int i = 0; i < 200 && !impl.server.is_running(); ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  return impl.server.is_running();
}

void Service::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->serve_thread.joinable()) impl_->serve_thread.join();
}

int Service::port() const { return impl_->bound_port; }

bool Service::ready() const { return impl_->model != nullptr; }

std::string Service::model_digest() const { return impl_->digest; }

}  // namespace dmind
