#include "dmind/probe.hpp"

#include <cmath>
#include <limits>

#include "dmind/digest.hpp"
#include "dmind/errors.hpp"

namespace dmind {

namespace {

double scaled_accuracy(const ProbeRecord& record, const DensityParams& params) {
  double accuracy = record.accuracy();
  return params.scale == DensityParams::AccuracyScale::Percent ? 100.0 * accuracy
                                                               : accuracy;
}

void require_complete(const ProbeRecord& record) {
  if (!record.complete || record.runs.empty() ||
      static_cast<int>(record.runs.size()) != record.k) {
    throw InputError("density requires a complete probe record for (" +
                     record.question_id + ", " +
                     std::string{to_string(record.mode)} + ")");
  }
}

}  // namespace

double thinking_density(const ProbeRecord& record, const DensityParams& params) {
  require_complete(record);
  if (record.correct_count == 0) return 0.0;
  return scaled_accuracy(record, params) / std::pow(record.avg_tokens(), params.alpha);
}

double log_density(const ProbeRecord& record, const DensityParams& params) {
  require_complete(record);
  if (record.correct_count == 0) {
    return -std::numeric_limits<double>::infinity();
  }
  return std::log(scaled_accuracy(record, params)) -
         params.alpha * std::log(record.avg_tokens());
}

ThinkingMode densest_mode(std::span<const ProbeRecord* const, 3> by_mode,
                          const DensityParams& params) {
  ThinkingMode best = ThinkingMode::Fast;
  double best_value = log_density(*by_mode[0], params);
  for (std::size_t i = 1; i < 3; ++i) {
    double value = log_density(*by_mode[i], params);
    if (value > best_value) {
      best_value = value;
      best = static_cast<ThinkingMode>(i);
    }
  }
  return best;
}

RunResult run_once(Backend& backend, const PromptBundle& bundle,
                   const RequestKey& key, const Question& q, bool store_text) {
  RunResult run;
  try {
    Completion completion = backend.complete(bundle, key);
    run.digest = digest_hex(completion.text);
    if (store_text) run.text = completion.text;
    run.output_tokens = completion.output_tokens;
    run.truncated = completion.truncated;
    run.correct = grade(completion.text, q.gold, q.task).correct;
  } catch (const TransportError&) {
    run.failed = true;
    run.digest = digest_hex("");
  } catch (const RequestError&) {
    run.failed = true;
    run.digest = digest_hex("");
  }
  return run;
}

std::vector<ProbeRecord> probe_question(const Question& q,
                                        std::span<const ThinkingMode> modes,
                                        int k, Backend& backend,
                                        const TemplateSet& templates,
                                        const ProbeOptions& options) {
  if (k < 1) throw InputError("probe requires k >= 1");

  std::vector<ProbeRecord> records;
  records.reserve(modes.size());
  const RequestKey key{q.id};

  for (ThinkingMode mode : modes) {
    const PromptBundle bundle = assemble_prompt(mode, q.text, templates);

    ProbeRecord record;
    record.question_id = q.id;
    record.dataset = q.dataset;
    record.question_text = q.text;
    record.mode = mode;
    record.k = k;

    bool any_failed = false;
    for (int run_index = 0; run_index < k; ++run_index) {
      RunResult run = run_once(backend, bundle, key, q, options.store_text);
      any_failed = any_failed || run.failed;
      record.correct_count += run.correct ? 1 : 0;
      record.runs.push_back(std::move(run));
    }
    record.complete = !any_failed;
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace dmind
