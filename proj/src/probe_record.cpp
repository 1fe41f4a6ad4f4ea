#include "dmind/probe_record.hpp"

#include <cmath>

#include "dmind/digest.hpp"
#include "dmind/errors.hpp"

namespace dmind {

using nlohmann::json;

double ProbeRecord::avg_tokens() const {
  if (runs.empty()) return 1.0;
  long long total = 0;
  for (const RunResult& run : runs) total += run.output_tokens;
  return static_cast<double>(total) / static_cast<double>(runs.size());
}

json probe_record_to_json(const ProbeRecord& record) {
  json runs = json::array();
  for (const RunResult& run : record.runs) {
    json r{{"digest", run.digest},
           {"correct", run.correct},
           {"output_tokens", run.output_tokens},
           {"truncated", run.truncated},
           {"failed", run.failed}};
    if (run.text) r["text"] = *run.text;
    runs.push_back(std::move(r));
  }
  return json{{"v", kProbeLogVersion},
              {"question_id", record.question_id},
              {"dataset", record.dataset},
              {"question", record.question_text},
              {"mode", to_string(record.mode)},
              {"k", record.k},
              {"correct_count", record.correct_count},
              {"complete", record.complete},
              {"avg_tokens", record.avg_tokens()},
              {"runs", std::move(runs)}};
}

ProbeRecord probe_record_from_json(const json& doc, const std::string& where) {
  if (!doc.contains("v")) throw ParseError(where + ": missing version field");
  if (doc.at("v").get<int>() != kProbeLogVersion) {
    throw ContractError(where + ": probe log version " + doc.at("v").dump() +
                        " does not match expected " +
                        std::to_string(kProbeLogVersion));
  }
  for (const char* key : {"question_id", "mode", "k", "correct_count", "runs"}) {
    if (!doc.contains(key)) {
      throw ParseError(where + ": missing field \"" + key + "\"");
    }
  }
  ProbeRecord record;
  record.question_id = doc.at("question_id").get<std::string>();
  record.dataset = doc.value("dataset", std::string{});
  record.question_text = doc.value("question", std::string{});
  auto mode = mode_from_string(doc.at("mode").get<std::string>());
  if (!mode) {
    throw ParseError(where + ": unknown mode \"" +
                     doc.at("mode").get<std::string>() + "\"");
  }
  record.mode = *mode;
  record.k = doc.at("k").get<int>();
  record.correct_count = doc.at("correct_count").get<int>();
  record.complete = doc.value("complete", false);
  if (record.k < 1) throw ParseError(where + ": k must be >= 1");

  for (const json& r : doc.at("runs")) {
    RunResult run;
    run.digest = r.value("digest", std::string{});
    if (r.contains("text")) run.text = r.at("text").get<std::string>();
    run.correct = r.value("correct", false);
    run.output_tokens = r.value("output_tokens", 1);
    run.truncated = r.value("truncated", false);
    run.failed = r.value("failed", false);
    if (run.output_tokens < 1) {
      throw ParseError(where + ": output_tokens must be >= 1");
    }
    record.runs.push_back(std::move(run));
  }

  int correct = 0;
  for (const RunResult& run : record.runs) correct += run.correct ? 1 : 0;
  if (correct != record.correct_count) {
    throw ParseError(where + ": correct_count " +
                     std::to_string(record.correct_count) +
                     " disagrees with runs (" + std::to_string(correct) + ")");
  }
  if (doc.contains("avg_tokens")) {
    double stored = doc.at("avg_tokens").get<double>();
    if (std::fabs(stored - record.avg_tokens()) > 1e-9) {
      throw ParseError(where + ": avg_tokens disagrees with runs");
    }
  }
  return record;
}

std::vector<ProbeRecord> parse_probe_log(std::string_view jsonl, std::string_view origin) {
  std::vector<ProbeRecord> out;
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
    out.push_back(probe_record_from_json(doc, where));
  }
  return out;
}

std::vector<ProbeRecord> load_probe_log(const std::filesystem::path& path) {
  return parse_probe_log(read_file(path), path.string());
}

std::string probe_log_to_jsonl(std::span<const ProbeRecord> records) {
  std::string out;
  for (const ProbeRecord& record : records) {
    out += probe_record_to_json(record).dump();
    out += '\n';
  }
  return out;
}

void write_probe_log(const std::filesystem::path& path,
                     std::span<const ProbeRecord> records) {
  write_file(path, probe_log_to_jsonl(records));
}

}  // namespace dmind
