#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dmind/mode.hpp"

namespace dmind {

inline constexpr int kProbeLogVersion = 1;

// Outcome of one sampled run.
struct RunResult {
  std::string digest;               // fnv1a64 hex of the completion text
  std::optional<std::string> text;  // present when the log stores full text
  bool correct = false;
  int output_tokens = 1;
  bool truncated = false;
  bool failed = false;  // transport failure after retries
};

// Per-(question, mode) aggregate of k runs. Accuracy is kept as the exact
// count so no floating accumulation enters the numerator.
struct ProbeRecord {
  std::string question_id;
  std::string dataset;
  std::string question_text;
  ThinkingMode mode = ThinkingMode::Normal;
  int k = 0;
  int correct_count = 0;
  bool complete = false;  // all k runs present, none failed
  std::vector<RunResult> runs;

  double accuracy() const {
    return k > 0 ? static_cast<double>(correct_count) / k : 0.0;
  }

  // Mean completion tokens per run; every run stores >= 1 token.
  double avg_tokens() const;
};

nlohmann::json probe_record_to_json(const ProbeRecord& record);
ProbeRecord probe_record_from_json(const nlohmann::json& doc, const std::string& where);

// JSONL probe log, one record per line, version field on every line.
std::vector<ProbeRecord> parse_probe_log(std::string_view jsonl, std::string_view origin);
std::vector<ProbeRecord> load_probe_log(const std::filesystem::path& path);
void write_probe_log(const std::filesystem::path& path, std::span<const ProbeRecord> records);
std::string probe_log_to_jsonl(std::span<const ProbeRecord> records);

}  // namespace dmind
