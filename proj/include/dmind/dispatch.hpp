#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dmind/probe.hpp"
#include "dmind/router.hpp"

namespace dmind {

inline constexpr int kEvalRunVersion = 1;

// Zero-shot CoT baseline: Normal-mode config with this user-message suffix.
inline constexpr std::string_view kCotSuffix = "Let's think step by step.";

// How a question is routed to a mode.
class Policy {
 public:
  enum class Kind { MindRouter, Fixed, Oracle, CoT };

  static Policy mind_router(std::shared_ptr<const RouterModel> model);
  static Policy fixed(ThinkingMode mode);
  // Precomputes per-question density argmax from the log; questions outside
  // the log raise a routing error at dispatch time.
  static Policy oracle(std::span<const ProbeRecord> log, const DensityParams& params);
  static Policy cot();

  Kind kind() const { return kind_; }
  std::string describe() const;
  const RouterModel* model() const { return model_.get(); }

  friend ThinkingMode route(const Policy& policy, const Question& question);

 private:
  explicit Policy(Kind kind) : kind_(kind) {}

  Kind kind_;
  std::shared_ptr<const RouterModel> model_;
  ThinkingMode fixed_mode_ = ThinkingMode::Normal;
  std::map<std::string, ThinkingMode> oracle_assignments_;
};

// Pure mode selection; performs no backend calls. Oracle policy missing the
// question -> ContractError.
ThinkingMode route(const Policy& policy, const Question& question);

// The bundle the policy would send: routed template, CoT suffix when the
// policy is CoT.
PromptBundle bundle_for(const Policy& policy, ThinkingMode mode,
                        const Question& question, const TemplateSet& templates);

struct RoutedAnswer {
  std::string question_id;
  std::string dataset;
  ThinkingMode chosen_mode = ThinkingMode::Normal;
  std::optional<std::array<double, 3>> router_probabilities;
  bool complete = true;
  std::vector<RunResult> runs;

  int correct_count() const;
  long long total_tokens() const;
};

// Routes once, then performs k graded runs under the chosen mode's bundle.
RoutedAnswer answer(const Question& question, const Policy& policy, int k,
                    Backend& backend, const TemplateSet& templates,
                    const ProbeOptions& options = {});

struct EvalManifest {
  int version = kEvalRunVersion;
  std::string policy;
  int k = 3;
  double alpha = 1.0;
  std::uint64_t seed = 0;
  std::string backend_model_id;
  std::string questions_digest;
  std::int64_t created_unix_ms = 0;
};

struct EvalRun {
  EvalManifest manifest;
  std::vector<RoutedAnswer> answers;  // input order
};

struct EvalOptions {
  int parallelism = 1;
  bool store_text = true;
};

// Processes all questions with bounded concurrency; answer order matches the
// question order regardless of completion order.
EvalRun run_eval(std::span<const Question> questions, const Policy& policy, int k,
                 Backend& backend, const TemplateSet& templates,
                 EvalManifest manifest, const EvalOptions& options = {});

// Answers as JSONL at path, manifest as a ".manifest.json" sidecar.
void write_eval_run(const std::filesystem::path& path, const EvalRun& run);
EvalRun load_eval_run(const std::filesystem::path& path);

}  // namespace dmind
