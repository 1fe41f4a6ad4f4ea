#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "dmind/dispatch.hpp"
#include "dmind/probe.hpp"
#include "dmind/router.hpp"
#include "dmind/tmc.hpp"

namespace dmind {

// One (dataset, policy) aggregate in the result-table format: accuracy in
// percent, mean completion tokens per run, and TD = acc% / tokens^alpha.
struct ReportRow {
  std::string dataset;
  std::string policy;
  int question_count = 0;
  long long total_runs = 0;
  long long correct_runs = 0;
  long long total_tokens = 0;
  double acc_percent = 0.0;
  double mean_tokens = 0.0;
  double td_report = 0.0;
};

struct EvalReport {
  double alpha = 1.0;
  std::vector<ReportRow> rows;  // sorted by (dataset, policy)
};

// acc% / mean_tokens^alpha; exactly 0 at zero accuracy.
double td_from_aggregates(double acc_percent, double mean_tokens, double alpha);

// Aggregates eval runs into report rows. Empty input -> InputError.
EvalReport report(std::span<const EvalRun> runs, double alpha);

std::string report_markdown(const EvalReport& report);
std::string report_csv(const EvalReport& report);
nlohmann::json report_json(const EvalReport& report);

// Per-question density argmax over a probe log, cheap-mode tie-break.
// Questions with missing mode records -> InputError listing their ids.
std::map<std::string, ThinkingMode> oracle_assignments(
    std::span<const ProbeRecord> log, const DensityParams& params);

struct ParetoModeStats {
  double mean_log_acc = 0.0;
  double mean_neg_log_tok = 0.0;
  double combined = 0.0;  // mean_log_acc + alpha * mean_neg_log_tok
  bool acc_dominated = false;  // oracle mean log-accuracy >= this mode's
  bool eff_dominated = false;  // oracle mean efficiency >= this mode's
  double combined_gap = 0.0;   // oracle combined minus this mode's, >= 0
};

// Dominance analysis of the oracle router against each fixed mode over the
// admissible questions (all three modes complete with accuracy > 0).
struct ParetoVerdict {
  double alpha = 1.0;
  int admissible_count = 0;
  int excluded_zero_accuracy_count = 0;
  bool vacuous = false;  // no admissible questions
  double oracle_mean_log_acc = 0.0;
  double oracle_mean_neg_log_tok = 0.0;
  double oracle_combined = 0.0;
  std::array<ParetoModeStats, 3> per_mode{};
};

ParetoVerdict pareto_check(std::span<const ProbeRecord> log, const DensityParams& params);
nlohmann::json verdict_json(const ParetoVerdict& verdict);

// Fraction of examples where the model's prediction equals the stored label.
// Empty dataset -> InputError.
double router_oracle_agreement(const RouterModel& model,
                               std::span<const TMCExample> dataset);

}  // namespace dmind
