#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "dmind/backend.hpp"

namespace dmind {

struct ServiceConfig {
  std::string listen_address = "127.0.0.1";
  int port = 0;  // 0 binds an ephemeral port
  BackendConfig upstream;
  std::string router_model_path;  // empty: service starts not-ready
  std::optional<std::string> templates_path;
  int request_timeout_ms = 30000;
  int max_concurrent_requests = 8;
};

// JSON config file; secrets stay in environment variables named by the file.
ServiceConfig load_service_config(const std::filesystem::path& path);

// HTTP gateway: POST /route, POST /v1/chat/completions (routed passthrough),
// GET /health. The proxy replaces the system message with the routed mode's
// template, caps max_tokens at min(client cap, mode cap), and reports the
// chosen mode in response headers.
class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  bool start();  // binds and serves on a background thread
  void stop();
  int port() const;  // bound port, valid after start()
  bool ready() const;
  std::string model_digest() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dmind
