#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dmind/grading.hpp"

namespace dmind {

// One QA item as read from a question file.
struct Question {
  std::string id;
  std::string dataset;
  std::string text;
  TaskType task;
  std::string gold;
  std::vector<std::string> choices;  // multiple choice only
};

// JSONL, one object per line: {id, dataset, question, task, answer, choices?}.
// task is one of multiple_choice | numeric | boolean | exact. Malformed lines,
// duplicate ids, or gold inconsistent with the task -> ParseError naming the
// line.
std::vector<Question> parse_questions(std::string_view jsonl, std::string_view origin);
std::vector<Question> load_questions(const std::filesystem::path& path);

}  // namespace dmind
