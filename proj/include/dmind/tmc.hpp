#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dmind/probe.hpp"
#include "dmind/probe_record.hpp"

namespace dmind {

inline constexpr int kTmcDatasetVersion = 1;

// One question's three mode records, indexed by mode.
struct ModeGroup {
  std::string question_id;
  std::string question_text;
  std::array<ProbeRecord, 3> records;

  const ProbeRecord& record(ThinkingMode mode) const {
    return records[mode_index(mode)];
  }
};

struct TMCExample {
  std::string question_id;
  std::string question_text;
  ThinkingMode label = ThinkingMode::Fast;
  std::array<double, 3> densities{};  // values used at labeling time
};

// Per-stage accounting; input_count == drops + labeled_count always.
struct BuildReport {
  int input_count = 0;
  int dropped_incomplete = 0;
  int dropped_competence = 0;
  int dropped_monotonicity = 0;
  int dropped_length = 0;
  int labeled_count = 0;
  std::array<int, 3> label_histogram{};
  double competence_threshold = 0.8;
  int max_length = 4096;  // 0 = disabled
  DensityParams params;
};

struct TmcConfig {
  double competence_threshold = 0.8;
  int max_length = 4096;  // question characters; 0 disables the filter
  DensityParams params;
};

// Groups records by question id; a question with a missing or duplicated
// mode record -> InputError. Output sorted by question_id.
std::vector<ModeGroup> group_by_question(std::span<const ProbeRecord> records);

// Keep iff any mode reaches the threshold (drop when all are below).
std::vector<ModeGroup> filter_competence(std::vector<ModeGroup> groups,
                                         double threshold);

// Keep iff avg_tokens(Fast) <= avg_tokens(Normal) <= avg_tokens(Slow).
std::vector<ModeGroup> filter_monotonic_tokens(std::vector<ModeGroup> groups);

// Drop questions whose text exceeds max_length characters; identity when
// max_length is 0.
std::vector<ModeGroup> filter_length(std::vector<ModeGroup> groups, int max_length);

// Density argmax with ties broken toward the cheaper mode.
TMCExample label_group(const ModeGroup& group, const DensityParams& params);

// Full pipeline: drop incomplete, competence, monotonicity, length, label.
std::pair<std::vector<TMCExample>, BuildReport> build_tmc(
    std::span<const ProbeRecord> records, const TmcConfig& config);

// JSONL dataset + JSON report serialization.
nlohmann::json tmc_example_to_json(const TMCExample& example);
TMCExample tmc_example_from_json(const nlohmann::json& doc, const std::string& where);
std::string tmc_dataset_to_jsonl(std::span<const TMCExample> dataset);
std::vector<TMCExample> parse_tmc_dataset(std::string_view jsonl, std::string_view origin);
std::vector<TMCExample> load_tmc_dataset(const std::filesystem::path& path);
void write_tmc_dataset(const std::filesystem::path& path, std::span<const TMCExample> dataset);
nlohmann::json build_report_to_json(const BuildReport& report);

}  // namespace dmind
