#include "dmind/tmc.hpp"

#include <algorithm>
#include <map>

#include "dmind/digest.hpp"
#include "dmind/errors.hpp"

namespace dmind {

using nlohmann::json;

std::vector<ModeGroup> group_by_question(std::span<const ProbeRecord> records) {
  std::map<std::string, std::array<const ProbeRecord*, 3>> by_question;
  for (const ProbeRecord& record : records) {
    auto& slots = by_question[record.question_id];
    const std::size_t idx = mode_index(record.mode);
    if (slots[idx] != nullptr) {
      throw InputError("duplicate probe record for (" + record.question_id +
                       ", " + std::string{to_string(record.mode)} + ")");
    }
    slots[idx] = &record;
  }

  std::vector<ModeGroup> groups;
  groups.reserve(by_question.size());
  for (const auto& [question_id, slots] : by_question) {
    for (ThinkingMode mode : kAllModes) {
      if (slots[mode_index(mode)] == nullptr) {
        throw InputError("question " + question_id + " is missing its " +
                         std::string{to_string(mode)} + " mode record");
      }
    }
    ModeGroup group;
    group.question_id = question_id;
    group.question_text = slots[0]->question_text;
    for (ThinkingMode mode : kAllModes) {
      group.records[mode_index(mode)] = *slots[mode_index(mode)];
    }
    groups.push_back(std::move(group));
  }
  return groups;  // std::map iteration keeps question_id order
}

namespace {

bool group_complete(const ModeGroup& group) {
  return std::all_of(group.records.begin(), group.records.end(),
                     [](const ProbeRecord& r) {
                       return r.complete && !r.runs.empty() &&
                              static_cast<int>(r.runs.size()) == r.k;
                     });
}

void require_groups_complete(std::span<const ModeGroup> groups) {
  for (const ModeGroup& group : groups) {
    if (!group_complete(group)) {
      throw InputError("group " + group.question_id +
                       " has incomplete mode records");
    }
  }
}

}  // namespace

std::vector<ModeGroup> filter_competence(std::vector<ModeGroup> groups,
                                         double threshold) {
  require_groups_complete(groups);
  std::erase_if(groups, [threshold](const ModeGroup& group) {
    double best = 0.0;
    for (const ProbeRecord& record : group.records) {
      best = std::max(best, record.accuracy());
    }
    return best < threshold;  // "consistently below": every mode under it
  });
  return groups;
}

std::vector<ModeGroup> filter_monotonic_tokens(std::vector<ModeGroup> groups) {
  require_groups_complete(groups);
  std::erase_if(groups, [](const ModeGroup& group) {
    const double fast = group.record(ThinkingMode::Fast).avg_tokens();
    const double normal = group.record(ThinkingMode::Normal).avg_tokens();
    const double slow = group.record(ThinkingMode::Slow).avg_tokens();
    return !(fast <= normal && normal <= slow);
  });
  return groups;
}

std::vector<ModeGroup> filter_length(std::vector<ModeGroup> groups, int max_length) {
  if (max_length <= 0) return groups;
  std::erase_if(groups, [max_length](const ModeGroup& group) {
    return group.question_text.size() > static_cast<std::size_t>(max_length);
  });
  return groups;
}

TMCExample label_group(const ModeGroup& group, const DensityParams& params) {
  TMCExample example;
  example.question_id = group.question_id;
  example.question_text = group.question_text;
  for (ThinkingMode mode : kAllModes) {
    example.densities[mode_index(mode)] =
        thinking_density(group.record(mode), params);
  }
  ThinkingMode best = ThinkingMode::Fast;
  for (ThinkingMode mode : {ThinkingMode::Normal, ThinkingMode::Slow}) {
    if (example.densities[mode_index(mode)] > example.densities[mode_index(best)]) {
      best = mode;
    }
  }
  example.label = best;
  return example;
}

std::pair<std::vector<TMCExample>, BuildReport> build_tmc(
    std::span<const ProbeRecord> records, const TmcConfig& config) {
  BuildReport report;
  report.competence_threshold = config.competence_threshold;
  report.max_length = config.max_length;
  report.params = config.params;

  std::vector<ModeGroup> groups = group_by_question(records);
  report.input_count = static_cast<int>(groups.size());

  std::erase_if(groups, [](const ModeGroup& g) { return !group_complete(g); });
  report.dropped_incomplete = report.input_count - static_cast<int>(groups.size());

  std::size_t before = groups.size();
  groups = filter_competence(std::move(groups), config.competence_threshold);
  report.dropped_competence = static_cast<int>(before - groups.size());

  before = groups.size();
  groups = filter_monotonic_tokens(std::move(groups));
  report.dropped_monotonicity = static_cast<int>(before - groups.size());

  before = groups.size();
  groups = filter_length(std::move(groups), config.max_length);
  report.dropped_length = static_cast<int>(before - groups.size());

  std::vector<TMCExample> dataset;
  dataset.reserve(groups.size());
  for (const ModeGroup& group : groups) {
    TMCExample example = label_group(group, config.params);
    report.label_histogram[mode_index(example.label)]++;
    dataset.push_back(std::move(example));
  }
  report.labeled_count = static_cast<int>(dataset.size());
  return {std::move(dataset), report};
}

json tmc_example_to_json(const TMCExample& example) {
  return json{{"v", kTmcDatasetVersion},
              {"question_id", example.question_id},
              {"question", example.question_text},
              {"label", to_string(example.label)},
              {"densities",
               json{{"fast", example.densities[0]},
                    {"normal", example.densities[1]},
                    {"slow", example.densities[2]}}}};
}

TMCExample tmc_example_from_json(const json& doc, const std::string& where) {
  if (!doc.contains("v")) throw ParseError(where + ": missing version field");
  if (doc.at("v").get<int>() != kTmcDatasetVersion) {
    throw ContractError(where + ": TMC dataset version " + doc.at("v").dump() +
                        " does not match expected " +
                        std::to_string(kTmcDatasetVersion));
  }
  TMCExample example;
  example.question_id = doc.at("question_id").get<std::string>();
  example.question_text = doc.at("question").get<std::string>();
  auto label = mode_from_string(doc.at("label").get<std::string>());
  if (!label) {
    throw ParseError(where + ": unknown label \"" +
                     doc.at("label").get<std::string>() + "\"");
  }
  example.label = *label;
  if (doc.contains("densities")) {
    const json& d = doc.at("densities");
    example.densities = {d.value("fast", 0.0), d.value("normal", 0.0),
                         d.value("slow", 0.0)};
  }
  return example;
}

std::string tmc_dataset_to_jsonl(std::span<const TMCExample> dataset) {
  std::string out;
  for (const TMCExample& example : dataset) {
    out += tmc_example_to_json(example).dump();
    out += '\n';
  }
  return out;
}

std::vector<TMCExample> parse_tmc_dataset(std::string_view jsonl,
                                          std::string_view origin) {
  std::vector<TMCExample> out;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= jsonl.size()) {
    std::size_t eol = jsonl.find('\n', pos);
    std::string_view line = jsonl.substr(
        pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? jsonl.size() + 1 : eol + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    const std::string where =
        std::string{origin} + " line " + std::to_string(line_no);
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
    out.push_back(tmc_example_from_json(doc, where));
  }
  return out;
}

std::vector<TMCExample> load_tmc_dataset(const std::filesystem::path& path) {
  return parse_tmc_dataset(read_file(path), path.string());
}

void write_tmc_dataset(const std::filesystem::path& path,
                       std::span<const TMCExample> dataset) {
  write_file(path, tmc_dataset_to_jsonl(dataset));
}

json build_report_to_json(const BuildReport& report) {
  return json{
      {"v", kTmcDatasetVersion},
      {"input_count", report.input_count},
      {"dropped_incomplete", report.dropped_incomplete},
      {"dropped_competence", report.dropped_competence},
      {"dropped_monotonicity", report.dropped_monotonicity},
      {"dropped_length", report.dropped_length},
      {"labeled_count", report.labeled_count},
      {"label_histogram",
       json{{"fast", report.label_histogram[0]},
            {"normal", report.label_histogram[1]},
            {"slow", report.label_histogram[2]}}},
      {"competence_threshold", report.competence_threshold},
      {"max_length", report.max_length},
      {"alpha", report.params.alpha},
      {"accuracy_scale",
       report.params.scale == DensityParams::AccuracyScale::Percent ? "percent"
                                                                    : "fraction"}};
}

}  // namespace dmind
