#pragma once

#include <array>
#include <span>
#include <vector>

#include "dmind/backend.hpp"
#include "dmind/probe_record.hpp"
#include "dmind/question.hpp"
#include "dmind/templates.hpp"

namespace dmind {

// Trade-off parameters for the density metric. Labeling defaults to the
// fraction scale (argmax-invariant); report tables use percent.
struct DensityParams {
  enum class AccuracyScale { Fraction, Percent };

  double alpha = 1.0;
  int k = 10;
  AccuracyScale scale = AccuracyScale::Fraction;
};

// accuracy / avg_tokens^alpha, with accuracy in the configured scale.
// Exactly 0 when no run was correct. Incomplete record -> InputError.
double thinking_density(const ProbeRecord& record, const DensityParams& params);

// log(accuracy) - alpha * log(avg_tokens); -infinity when accuracy is 0.
double log_density(const ProbeRecord& record, const DensityParams& params);

// Mode with the highest log-density among the three per-mode records, ties
// broken toward the cheaper mode. Used by oracle routing.
ThinkingMode densest_mode(std::span<const ProbeRecord* const, 3> by_mode,
                          const DensityParams& params);

struct ProbeOptions {
  bool store_text = true;  // keep full run text in the log (enables replay)
};

// One graded backend call; transport failures come back as failed runs.
RunResult run_once(Backend& backend, const PromptBundle& bundle,
                   const RequestKey& key, const Question& q, bool store_text);

// Runs q k times per requested mode, grades each run, and aggregates.
// A transport failure after retries marks the run failed and the record
// incomplete. k < 1 -> InputError.
std::vector<ProbeRecord> probe_question(const Question& q,
                                        std::span<const ThinkingMode> modes,
                                        int k, Backend& backend,
                                        const TemplateSet& templates,
                                        const ProbeOptions& options = {});

}  // namespace dmind
