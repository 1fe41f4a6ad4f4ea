#pragma once

#include <stdexcept>

namespace dmind {

// Error taxonomy; the CLI maps each class to a distinct exit code (see cli.hpp).

// Bad configuration: missing files, bad keys, malformed config values.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input data (question files, logs, datasets); message names the line.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Network-level failure after retries were exhausted.
struct TransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-retryable request rejection (HTTP 4xx class).
struct RequestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Violated inter-artifact contract: version mismatch, corrupt model file,
// scripted/replay miss, missing oracle coverage.
struct ContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operation precondition violated by the caller.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dmind
