#include "dmind/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "dmind/errors.hpp"

namespace dmind {

using nlohmann::json;

double td_from_aggregates(double acc_percent, double mean_tokens, double alpha) {
  if (acc_percent <= 0.0) return 0.0;
  return acc_percent / std::pow(mean_tokens, alpha);
}

EvalReport report(std::span<const EvalRun> runs, double alpha) {
  if (runs.empty()) throw InputError("report requires at least one eval run");

  std::map<std::pair<std::string, std::string>, ReportRow> rows;
  for (const EvalRun& run : runs) {
    if (run.answers.empty()) throw InputError("report requires non-empty eval runs");
    for (const RoutedAnswer& answer : run.answers) {
      ReportRow& row = rows[{answer.dataset, run.manifest.policy}];
      row.dataset = answer.dataset;
      row.policy = run.manifest.policy;
      row.question_count += 1;
      row.total_runs += static_cast<long long>(answer.runs.size());
      row.correct_runs += answer.correct_count();
      row.total_tokens += answer.total_tokens();
    }
  }

  EvalReport result;
  result.alpha = alpha;
  for (auto& [key, row] : rows) {
    row.acc_percent = row.total_runs > 0
                          ? 100.0 * static_cast<double>(row.correct_runs) /
                                static_cast<double>(row.total_runs)
                          : 0.0;
    row.mean_tokens = row.total_runs > 0
                          ? static_cast<double>(row.total_tokens) /
                                static_cast<double>(row.total_runs)
                          : 0.0;
    row.td_report = td_from_aggregates(row.acc_percent, row.mean_tokens, alpha);
    result.rows.push_back(row);
  }
  return result;
}

namespace {

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

}  // namespace

std::string report_markdown(const EvalReport& report) {
  // Mirrors the ACC(#Token) | TD column pair per dataset.
  std::vector<std::string> datasets;
  std::vector<std::string> policies;
  for (const ReportRow& row : report.rows) {
    if (std::find(datasets.begin(), datasets.end(), row.dataset) == datasets.end()) {
      datasets.push_back(row.dataset);
    }
    if (std::find(policies.begin(), policies.end(), row.policy) == policies.end()) {
      policies.push_back(row.policy);
    }
  }
  std::sort(datasets.begin(), datasets.end());
  std::sort(policies.begin(), policies.end());

  std::map<std::pair<std::string, std::string>, const ReportRow*> index;
  for (const ReportRow& row : report.rows) {
    index[{row.dataset, row.policy}] = &row;
  }

  std::ostringstream out;
  out << "| Method |";
  for (const std::string& dataset : datasets) {
    out << " " << dataset << " ACC(#Token) | " << dataset << " TD |";
  }
  out << "\n|---|";
  for (std::size_t i = 0; i < datasets.size(); ++i) out << "---|---|";
  out << "\n";
  for (const std::string& policy : policies) {
    out << "| " << policy << " |";
    for (const std::string& dataset : datasets) {
      auto it = index.find({dataset, policy});
      if (it == index.end()) {
        out << " - | - |";
        continue;
      }
      const ReportRow& row = *it->second;
      out << " " << format_fixed(row.acc_percent, 2) << "("
          << format_fixed(row.mean_tokens, 2) << ") | "
          << format_fixed(row.td_report, 2) << " |";
    }
    out << "\n";
  }
  return out.str();
}

std::string report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "dataset,policy,questions,total_runs,correct_runs,acc_percent,mean_tokens,td\n";
  for (const ReportRow& row : report.rows) {
    out << row.dataset << ',' << row.policy << ',' << row.question_count << ','
        << row.total_runs << ',' << row.correct_runs << ','
        << format_fixed(row.acc_percent, 6) << ','
        << format_fixed(row.mean_tokens, 6) << ','
        << format_fixed(row.td_report, 6) << '\n';
  }
  return out.str();
}

json report_json(const EvalReport& report) {
  json rows = json::array();
  for (const ReportRow& row : report.rows) {
    rows.push_back(json{{"dataset", row.dataset},
                        {"policy", row.policy},
                        {"questions", row.question_count},
                        {"total_runs", row.total_runs},
                        {"correct_runs", row.correct_runs},
                        {"acc_percent", row.acc_percent},
                        {"mean_tokens", row.mean_tokens},
                        {"td", row.td_report}});
  }
  return json{{"v", 1}, {"alpha", report.alpha}, {"rows", std::move(rows)}};
}

namespace {

struct GroupedLog {
  std::vector<ModeGroup> groups;
};

// Strict grouping that lists every question missing a mode record.
std::vector<ModeGroup> group_or_list_missing(std::span<const ProbeRecord> log) {
  std::map<std::string, std::array<const ProbeRecord*, 3>> by_question;
  for (const ProbeRecord& record : log) {
    auto& slots = by_question[record.question_id];
    const std::size_t idx = mode_index(record.mode);
    if (slots[idx] != nullptr) {
      throw InputError("duplicate probe record for (" + record.question_id +
                       ", " + std::string{to_string(record.mode)} + ")");
    }
    slots[idx] = &record;
  }
  std::string missing;
  for (const auto& [question_id, slots] : by_question) {
    for (ThinkingMode mode : kAllModes) {
      if (slots[mode_index(mode)] == nullptr) {
        if (!missing.empty()) missing += ", ";
        missing += question_id;
        break;
      }
    }
  }
  if (!missing.empty()) {
    throw InputError("questions missing mode records: " + missing);
  }
  std::vector<ModeGroup> groups;
  groups.reserve(by_question.size());
  for (const auto& [question_id, slots] : by_question) {
    ModeGroup group;
    group.question_id = question_id;
    group.question_text = slots[0]->question_text;
    for (ThinkingMode mode : kAllModes) {
      group.records[mode_index(mode)] = *slots[mode_index(mode)];
    }
    groups.push_back(std::move(group));
  }
  return groups;
}

}  // namespace

std::map<std::string, ThinkingMode> oracle_assignments(
    std::span<const ProbeRecord> log, const DensityParams& params) {
  std::map<std::string, ThinkingMode> out;
  for (const ModeGroup& group : group_or_list_missing(log)) {
    const std::array<const ProbeRecord*, 3> by_mode = {
        &group.records[0], &group.records[1], &group.records[2]};
    out[group.question_id] = densest_mode(by_mode, params);
  }
  return out;
}

ParetoVerdict pareto_check(std::span<const ProbeRecord> log,
                           const DensityParams& params) {
  ParetoVerdict verdict;
  verdict.alpha = params.alpha;

  std::array<double, 3> sum_log_acc{};
  std::array<double, 3> sum_neg_log_tok{};
  std::array<double, 3> sum_gap{};
  double oracle_sum_log_acc = 0.0;
  double oracle_sum_neg_log_tok = 0.0;

  for (const ModeGroup& group : group_or_list_missing(log)) {
    bool admissible = true;
    for (const ProbeRecord& record : group.records) {
      if (!record.complete || record.correct_count == 0) admissible = false;
    }
    if (!admissible) {
      verdict.excluded_zero_accuracy_count += 1;
      continue;
    }
    verdict.admissible_count += 1;

    std::array<double, 3> log_acc{};
    std::array<double, 3> neg_log_tok{};
    std::array<double, 3> combined{};
    for (ThinkingMode mode : kAllModes) {
      const std::size_t i = mode_index(mode);
      const ProbeRecord& record = group.records[i];
      double accuracy = record.accuracy();
      if (params.scale == DensityParams::AccuracyScale::Percent) accuracy *= 100.0;
      log_acc[i] = std::log(accuracy);
      neg_log_tok[i] = -std::log(record.avg_tokens());
      combined[i] = log_acc[i] + params.alpha * neg_log_tok[i];
    }

    // Pointwise argmax with the cheap-mode tie-break; the per-question gap
    // is computed against the identical floats, so it is exactly >= 0.
    std::size_t best = 0;
    for (std::size_t i = 1; i < 3; ++i) {
      if (combined[i] > combined[best]) best = i;
    }
    oracle_sum_log_acc += log_acc[best];
    oracle_sum_neg_log_tok += neg_log_tok[best];
    for (std::size_t i = 0; i < 3; ++i) {
      sum_log_acc[i] += log_acc[i];
      sum_neg_log_tok[i] += neg_log_tok[i];
      sum_gap[i] += combined[best] - combined[i];
    }
  }

  if (verdict.admissible_count == 0) {
    verdict.vacuous = true;
    return verdict;
  }

  const double n = static_cast<double>(verdict.admissible_count);
  verdict.oracle_mean_log_acc = oracle_sum_log_acc / n;
  verdict.oracle_mean_neg_log_tok = oracle_sum_neg_log_tok / n;
  verdict.oracle_combined = verdict.oracle_mean_log_acc +
                            params.alpha * verdict.oracle_mean_neg_log_tok;
  for (std::size_t i = 0; i < 3; ++i) {
    ParetoModeStats& stats = verdict.per_mode[i];
    stats.mean_log_acc = sum_log_acc[i] / n;
    stats.mean_neg_log_tok = sum_neg_log_tok[i] / n;
    stats.combined = stats.mean_log_acc + params.alpha * stats.mean_neg_log_tok;
    stats.acc_dominated = verdict.oracle_mean_log_acc >= stats.mean_log_acc;
    stats.eff_dominated = verdict.oracle_mean_neg_log_tok >= stats.mean_neg_log_tok;
    stats.combined_gap = sum_gap[i] / n;
  }
  return verdict;
}

json verdict_json(const ParetoVerdict& verdict) {
  json modes;
  for (ThinkingMode mode : kAllModes) {
    const ParetoModeStats& stats = verdict.per_mode[mode_index(mode)];
    modes[std::string{to_string(mode)}] =
        json{{"mean_log_acc", stats.mean_log_acc},
             {"mean_neg_log_tok", stats.mean_neg_log_tok},
             {"combined", stats.combined},
             {"acc_dominated", stats.acc_dominated},
             {"eff_dominated", stats.eff_dominated},
             {"combined_gap", stats.combined_gap}};
  }
  return json{{"v", 1},
              {"alpha", verdict.alpha},
              {"admissible_count", verdict.admissible_count},
              {"excluded_zero_accuracy_count", verdict.excluded_zero_accuracy_count},
              {"vacuous", verdict.vacuous},
              {"oracle",
               json{{"mean_log_acc", verdict.oracle_mean_log_acc},
                    {"mean_neg_log_tok", verdict.oracle_mean_neg_log_tok},
                    {"combined", verdict.oracle_combined}}},
              {"modes", std::move(modes)}};
}

double router_oracle_agreement(const RouterModel& model,
                               std::span<const TMCExample> dataset) {
  if (dataset.empty()) throw InputError("agreement requires a non-empty dataset");
  int agree = 0;
  for (const TMCExample& example : dataset) {
    if (predict(model, example.question_text).mode == example.label) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(dataset.size());
}

}  // namespace dmind
