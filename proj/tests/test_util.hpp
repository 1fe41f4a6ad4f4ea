#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "dmind/backend.hpp"
#include "dmind/probe_record.hpp"
#include "dmind/question.hpp"

namespace dmind::testutil {

// Unique scratch directory, removed on destruction.
struct TempDir {
  std::filesystem::path path;

  TempDir() {
    static std::atomic<int> counter{0};
    path = std::filesystem::temp_directory_path() /
           ("dmind_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::filesystem::path file(const std::string& name) const { return path / name; }
};

inline Question make_question(std::string id, std::string text, std::string gold,
                              TaskKind kind = TaskKind::ExactString,
                              std::string dataset = "test") {
  Question q;
  q.id = std::move(id);
  q.dataset = std::move(dataset);
  q.text = std::move(text);
  q.task.kind = kind;
  q.gold = std::move(gold);
  return q;
}

// Complete record with uniform runs: `correct` of them right, all with the
// same token count.
inline ProbeRecord make_record(std::string question_id, ThinkingMode mode, int k,
                               int correct, int tokens_per_run,
                               std::string question_text = "") {
  ProbeRecord record;
  record.question_id = question_id;
  record.dataset = "test";
  record.question_text =
      question_text.empty() ? "question " + question_id : std::move(question_text);
  record.mode = mode;
  record.k = k;
  record.correct_count = correct;
  record.complete = true;
  for (int i = 0; i < k; ++i) {
    RunResult run;
    run.digest = "d" + std::to_string(i);
    run.text = "run " + std::to_string(i);
    run.correct = i < correct;
    run.output_tokens = tokens_per_run;
    record.runs.push_back(std::move(run));
  }
  return record;
}

// Same but with explicit per-run token counts.
inline ProbeRecord make_record_tokens(std::string question_id, ThinkingMode mode,
                                      int correct, const std::vector<int>& tokens,
                                      std::string question_text = "") {
  ProbeRecord record = make_record(std::move(question_id), mode,
                                   static_cast<int>(tokens.size()), correct, 1,
                                   std::move(question_text));
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    record.runs[i].output_tokens = tokens[i];
  }
  return record;
}

}  // namespace dmind::testutil
