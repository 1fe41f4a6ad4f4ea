#include "dmind/question.hpp"

#include <unordered_set>

#include "json.hpp"

#include "dmind/digest.hpp"
#include "dmind/errors.hpp"

namespace dmind {

namespace {

using nlohmann::json;

Question question_from_json(const json& doc, const std::string& where) {
  for (const char* key : {"id", "question", "task", "answer"}) {
    if (!doc.contains(key)) {
      throw ParseError(where + ": missing field \"" + key + "\"");
    }
  }
  Question q;
  q.id = doc.at("id").get<std::string>();
  q.dataset = doc.value("dataset", std::string{});
  q.text = doc.at("question").get<std::string>();
  if (doc.at("answer").is_string()) {
    q.gold = doc.at("answer").get<std::string>();
  } else {
    q.gold = doc.at("answer").dump();
  }
  if (q.id.empty()) throw ParseError(where + ": empty id");
  if (q.text.empty()) throw ParseError(where + ": empty question");

  const std::string task_name = doc.at("task").get<std::string>();
  auto kind = task_kind_from_string(task_name);
  if (!kind) {
    throw ParseError(where + ": unknown task \"" + task_name + "\"");
  }
  q.task.kind = *kind;

  if (doc.contains("choices")) {
    q.choices = doc.at("choices").get<std::vector<std::string>>();
  }
  if (q.task.kind == TaskKind::MultipleChoice) {
    int count = q.choices.empty() ? 4 : static_cast<int>(q.choices.size());
    if (count < 2 || count > 5) {
      throw ParseError(where + ": choice count " + std::to_string(count) +
                       " outside supported range 2..5");
    }
    q.task.choice_count = count;
  }

  // Gold must conform to the task type; fail at parse time, before any probing.
  try {
    GradeResult r = grade(q.gold, q.gold, q.task);
    (void)r;
  } catch (const ConfigError& e) {
    throw ParseError(where + ": " + e.what());
  }
  return q;
}

}  // namespace

std::vector<Question> parse_questions(std::string_view jsonl, std::string_view origin) {
  std::vector<Question> out;
  std::unordered_set<std::string> seen_ids;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= jsonl.size()) {
    std::size_t eol = jsonl.find('\n', pos);
    std::string_view line = jsonl.substr(pos, eol == std::string_view::npos
                                                  ? std::string_view::npos
                                                  : eol - pos);
    pos = eol == std::string_view::npos ? jsonl.size() + 1 : eol + 1;
    ++line_no;
    bool blank = line.find_first_not_of(" \t\r") == std::string_view::npos;
    if (blank) continue;

    const std::string where =
        std::string{origin} + " line " + std::to_string(line_no);
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
    Question q = question_from_json(doc, where);
    if (!seen_ids.insert(q.id).second) {
      throw ParseError(where + ": duplicate question id \"" + q.id + "\"");
    }
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<Question> load_questions(const std::filesystem::path& path) {
  return parse_questions(read_file(path), path.string());
}

}  // namespace dmind
