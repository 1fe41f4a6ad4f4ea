#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace dmind {

enum class TaskKind { MultipleChoice, NumericMath, BooleanYesNo, ExactString };

std::string_view to_string(TaskKind kind);
std::optional<TaskKind> task_kind_from_string(std::string_view name);

struct TaskType {
  TaskKind kind = TaskKind::ExactString;
  // MultipleChoice option letters A..(A+choice_count-1); 2..5 supported.
  int choice_count = 4;
};

// Exact rational when the text parses losslessly, double fallback otherwise.
struct NumericValue {
  bool exact = false;
  long long num = 0;
  long long den = 1;
  double approx = 0.0;

  // "1050", "1/2" (reduced), or a decimal rendering for inexact values.
  std::string canonical() const;
};

// Parses one number token: commas, leading $, fractions a/b, decimals,
// scientific notation. Returns nullopt when the token is not a number.
std::optional<NumericValue> parse_numeric(std::string_view token);

struct GradeResult {
  enum class Reason { Matched, Mismatched, NoAnswerFound };

  std::optional<std::string> extracted;
  bool correct = false;
  Reason reason = Reason::NoAnswerFound;
};

// Last-occurrence-wins extraction of the final answer; never throws.
// MultipleChoice -> last standalone option letter or "answer is X" pattern;
// NumericMath -> last number, normalized; BooleanYesNo -> last yes/no token;
// ExactString -> text after the final "answer:" marker, else full text.
std::optional<std::string> extract_answer(std::string_view text,
                                          const TaskType& task);

// Judges a completion against the gold answer. Gold that does not conform to
// the task type -> ConfigError. Numeric compare is exact on rationals when
// both sides parse exactly, absolute tolerance 1e-6 otherwise; letters and
// yes/no compare case-insensitively.
GradeResult grade(std::string_view text, std::string_view gold,
                  const TaskType& task);

}  // namespace dmind
