#include "dmind/grading.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>

#include "dmind/errors.hpp"

namespace dmind {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool ci_equal(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (lower(a[i]) != lower(b[i])) return false;
  }
  return true;
}

// Accumulates digits into an int64, failing on overflow.
bool append_digit(long long& value, char digit) {
  constexpr long long kMax = 9223372036854775807ll;
  int d = digit - '0';
  if (value > (kMax - d) / 10) return false;
  value = value * 10 + d;
  return true;
}

bool pow10_ll(int exp, long long& out) {
  out = 1;
  for (int i = 0; i < exp; ++i) {
    if (out > 922337203685477580ll) return false;
    out *= 10;
  }
  return true;
}

void reduce(NumericValue& v) {
  if (!v.exact) return;
  if (v.den < 0) {
    v.den = -v.den;
    v.num = -v.num;
  }
  long long g = std::gcd(v.num < 0 ? -v.num : v.num, v.den);
  if (g > 1) {
    v.num /= g;
    v.den /= g;
  }
}

}  // namespace

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::MultipleChoice:
      return "multiple_choice";
    case TaskKind::NumericMath:
      return "numeric";
    case TaskKind::BooleanYesNo:
      return "boolean";
    case TaskKind::ExactString:
      return "exact";
  }
  return "exact";
}

std::optional<TaskKind> task_kind_from_string(std::string_view name) {
  if (name == "multiple_choice") return TaskKind::MultipleChoice;
  if (name == "numeric") return TaskKind::NumericMath;
  if (name == "boolean") return TaskKind::BooleanYesNo;
  if (name == "exact") return TaskKind::ExactString;
  return std::nullopt;
}

std::string NumericValue::canonical() const {
  if (exact) {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", approx);
  return buf;
}

std::optional<NumericValue> parse_numeric(std::string_view token) {
  std::string_view s = trim(token);
  if (s.empty()) return std::nullopt;

  bool negative = false;
  std::size_t i = 0;
  if (s[i] == '+' || s[i] == '-') {
    negative = s[i] == '-';
    ++i;
  }
  if (i < s.size() && s[i] == '$') ++i;
  if (i >= s.size()) return std::nullopt;

  std::string digits;  // integer-part digits, commas stripped
  bool any_digit = false;
  while (i < s.size()) {
    if (is_digit(s[i])) {
      digits.push_back(s[i]);
      any_digit = true;
      ++i;
    } else if (s[i] == ',' && i + 1 < s.size() && is_digit(s[i + 1])) {
      ++i;
    } else {
      break;
    }
  }

  std::string frac;
  bool has_dot = false;
  if (i < s.size() && s[i] == '.' && i + 1 < s.size() && is_digit(s[i + 1])) {
    has_dot = true;
    ++i;
    while (i < s.size() && is_digit(s[i])) {
      frac.push_back(s[i]);
      any_digit = true;
      ++i;
    }
  }
  if (!any_digit) return std::nullopt;

  long long exp10 = 0;
  bool has_exp = false;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    std::size_t j = i + 1;
    bool exp_neg = false;
    if (j < s.size() && (s[j] == '+' || s[j] == '-')) {
      exp_neg = s[j] == '-';
      ++j;
    }
    if (j < s.size() && is_digit(s[j])) {
      has_exp = true;
      long long e = 0;
      while (j < s.size() && is_digit(s[j])) {
        if (!append_digit(e, s[j])) return std::nullopt;
        ++j;
      }
      exp10 = exp_neg ? -e : e;
      i = j;
    }
  }

  long long denom = 0;
  bool has_fraction = false;
  if (!has_dot && !has_exp && i < s.size() && s[i] == '/' && i + 1 < s.size() &&
      is_digit(s[i + 1])) {
    has_fraction = true;
    ++i;
    denom = 0;
    while (i < s.size() && is_digit(s[i])) {
      if (!append_digit(denom, s[i])) return std::nullopt;
      ++i;
    }
    if (denom == 0) return std::nullopt;
  }

  // Trailing sentence period or percent sign are tolerated.
  std::string_view rest = trim(s.substr(i));
  while (!rest.empty() && (rest.back() == '.' || rest.back() == '%')) rest.remove_suffix(1);
  if (!trim(rest).empty()) return std::nullopt;

  NumericValue v;
  long long mantissa = 0;
  bool exact_ok = true;
  for (char c : digits) exact_ok = exact_ok && append_digit(mantissa, c);
  for (char c : frac) exact_ok = exact_ok && append_digit(mantissa, c);

  long long net_exp = exp10 - static_cast<long long>(frac.size());
  if (exact_ok) {
    long long num = mantissa;
    long long den = 1;
    if (net_exp > 18 || net_exp < -18) {
      exact_ok = false;
    } else if (net_exp >= 0) {
      long long scale;
      exact_ok = pow10_ll(static_cast<int>(net_exp), scale) &&
                 (num == 0 || num <= 9223372036854775807ll / scale);
      if (exact_ok) num *= scale;
    } else {
      exact_ok = pow10_ll(static_cast<int>(-net_exp), den);
    }
    if (exact_ok && has_fraction) {
      // a/b with a possibly scaled; den currently 1 (no dot/exp with fraction)
      den = denom;
    }
    if (exact_ok) {
      v.exact = true;
      v.num = negative ? -num : num;
      v.den = den;
      reduce(v);
    }
  }

  std::string plain;
  if (negative) plain.push_back('-');
  plain += digits.empty() ? "0" : digits;
  if (!frac.empty()) plain += "." + frac;
  if (exp10 != 0) plain += "e" + std::to_string(exp10);
  v.approx = std::strtod(plain.c_str(), nullptr);
  if (has_fraction) v.approx /= static_cast<double>(denom);
  if (v.exact) v.approx = static_cast<double>(v.num) / static_cast<double>(v.den);
  return v;
}

namespace {

// Last number token in free text, e.g. "She pays $1,050 total." -> 1050.
std::optional<NumericValue> extract_last_number(std::string_view text) {
  std::optional<NumericValue> best;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    bool starts_here = false;
    std::size_t start = i;
    if (is_digit(c)) {
      // Digits glued to a preceding letter are identifiers, not numbers.
      if (i > 0 && (is_alpha(text[i - 1]) || text[i - 1] == '_')) {
        while (i < n && is_alnum(text[i])) ++i;
        continue;
      }
      starts_here = true;
      // Pull in a sign or currency prefix when it is not an infix operator.
      std::size_t p = i;
      if (p > 0 && text[p - 1] == '$') --p;
      if (p > 0 && (text[p - 1] == '-' || text[p - 1] == '+')) {
        bool infix = p >= 2 && (is_alnum(text[p - 2]) || text[p - 2] == ')');
        if (!infix) --p;
      }
      start = p;
    } else if (c == '.' && i + 1 < n && is_digit(text[i + 1]) &&
               (i == 0 || !is_alnum(text[i - 1]))) {
      starts_here = true;
    }
    if (!starts_here) {
      ++i;
      continue;
    }

    // Greedy scan of the candidate token.
    std::size_t j = i;
    while (j < n && is_digit(text[j])) ++j;
    while (j < n && text[j] == ',' && j + 1 < n && is_digit(text[j + 1])) {
      ++j;
      while (j < n && is_digit(text[j])) ++j;
    }
    if (j < n && text[j] == '.' && j + 1 < n && is_digit(text[j + 1])) {
      ++j;
      while (j < n && is_digit(text[j])) ++j;
    }
    if (j < n && (text[j] == 'e' || text[j] == 'E')) {
      std::size_t k = j + 1;
      if (k < n && (text[k] == '+' || text[k] == '-')) ++k;
      if (k < n && is_digit(text[k])) {
        j = k;
        while (j < n && is_digit(text[j])) ++j;
      }
    }
    if (j < n && text[j] == '/' && j + 1 < n && is_digit(text[j + 1])) {
      std::size_t k = j + 1;
      while (k < n && is_digit(text[k])) ++k;
      // "3/4/2021" keeps only "3/4"; the trailing date piece parses later.
      j = k;
    }

    if (auto value = parse_numeric(text.substr(start, j - start))) {
      best = value;
    }
    i = j > i ? j : i + 1;
  }
  return best;
}

// Letter must stand alone: non-alphanumeric on both sides.
bool standalone_at(std::string_view text, std::size_t pos) {
  if (pos > 0 && is_alnum(text[pos - 1])) return false;
  if (pos + 1 < text.size() && is_alnum(text[pos + 1])) return false;
  return true;
}

std::optional<std::string> extract_choice(std::string_view text, int choice_count) {
  const char last_label = static_cast<char>('A' + choice_count - 1);
  std::optional<char> best;
  std::size_t best_pos = 0;

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c >= 'A' && c <= last_label && standalone_at(text, i)) {
      best = c;
      best_pos = i;
    }
  }

  // "answer is b" / "answer: (C)" also accepts lowercase letters.
  static constexpr std::string_view kMarker = "answer";
  for (std::size_t i = 0; i + kMarker.size() <= text.size(); ++i) {
    if (!ci_equal(text.substr(i, kMarker.size()), kMarker)) continue;
    std::size_t j = i + kMarker.size();
    while (j < text.size() && text[j] == ' ') ++j;
    if (j + 1 < text.size() && lower(text[j]) == 'i' && lower(text[j + 1]) == 's') {
      j += 2;
    } else if (j < text.size() && text[j] == ':') {
      ++j;
    }
    while (j < text.size() && (text[j] == ' ' || text[j] == '(' || text[j] == '*')) ++j;
    if (j < text.size()) {
      char u = static_cast<char>(std::toupper(static_cast<unsigned char>(text[j])));
      if (u >= 'A' && u <= last_label && standalone_at(text, j)) {
        if (!best || j >= best_pos) {
          best = u;
          best_pos = j;
        }
      }
    }
  }

  if (!best) return std::nullopt;
  return std::string(1, *best);
}

std::optional<std::string> extract_yes_no(std::string_view text) {
  std::optional<std::string> best;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (i > 0 && is_alnum(text[i - 1])) continue;
    for (std::string_view word : {std::string_view{"yes"}, std::string_view{"no"}}) {
      if (i + word.size() <= text.size() && ci_equal(text.substr(i, word.size()), word)) {
        if (i + word.size() == text.size() || !is_alnum(text[i + word.size()])) {
          best = std::string{word};
        }
      }
    }
  }
  return best;
}

std::optional<std::string> extract_exact(std::string_view text) {
  static constexpr std::string_view kMarker = "answer:";
  std::optional<std::size_t> marker_end;
  for (std::size_t i = 0; i + kMarker.size() <= text.size(); ++i) {
    if (ci_equal(text.substr(i, kMarker.size()), kMarker)) {
      marker_end = i + kMarker.size();
    }
  }
  std::string_view out = marker_end ? text.substr(*marker_end) : text;
  out = trim(out);
  if (out.empty()) return std::nullopt;
  return std::string{out};
}

}  // namespace

std::optional<std::string> extract_answer(std::string_view text, const TaskType& task) {
  switch (task.kind) {
    case TaskKind::MultipleChoice:
      return extract_choice(text, task.choice_count);
    case TaskKind::NumericMath: {
      auto value = extract_last_number(text);
      if (!value) return std::nullopt;
      return value->canonical();
    }
    case TaskKind::BooleanYesNo:
      return extract_yes_no(text);
    case TaskKind::ExactString:
      return extract_exact(text);
  }
  return std::nullopt;
}

namespace {

bool numeric_equal(const NumericValue& a, const NumericValue& b) {
  if (a.exact && b.exact) {
    return static_cast<__int128>(a.num) * b.den == static_cast<__int128>(b.num) * a.den;
  }
  return std::fabs(a.approx - b.approx) <= 1e-6;
}

}  // namespace

GradeResult grade(std::string_view text, std::string_view gold, const TaskType& task) {
  GradeResult result;

  switch (task.kind) {
    case TaskKind::MultipleChoice: {
      std::string_view g = trim(gold);
      const char last_label = static_cast<char>('A' + task.choice_count - 1);
      char gu = g.size() == 1
                    ? static_cast<char>(std::toupper(static_cast<unsigned char>(g[0])))
                    : '\0';
      if (gu < 'A' || gu > last_label) {
        throw ConfigError("gold answer \"" + std::string{gold} +
                          "\" is not a choice letter in range");
      }
      result.extracted = extract_answer(text, task);
      if (!result.extracted) return result;
      result.correct = (*result.extracted)[0] == gu;
      break;
    }
    case TaskKind::NumericMath: {
      auto gold_value = parse_numeric(gold);
      if (!gold_value) {
        throw ConfigError("gold answer \"" + std::string{gold} + "\" is not numeric");
      }
      auto value = extract_last_number(text);
      if (!value) return result;
      result.extracted = value->canonical();
      result.correct = numeric_equal(*value, *gold_value);
      break;
    }
    case TaskKind::BooleanYesNo: {
      std::string_view g = trim(gold);
      if (!ci_equal(g, "yes") && !ci_equal(g, "no")) {
        throw ConfigError("gold answer \"" + std::string{gold} + "\" is not yes/no");
      }
      result.extracted = extract_answer(text, task);
      if (!result.extracted) return result;
      result.correct = ci_equal(*result.extracted, g);
      break;
    }
    case TaskKind::ExactString: {
      result.extracted = extract_answer(text, task);
      if (!result.extracted) return result;
      result.correct = *result.extracted == trim(gold);
      break;
    }
  }

  result.reason = result.correct ? GradeResult::Reason::Matched
                                 : GradeResult::Reason::Mismatched;
  return result;
}

}  // namespace dmind
