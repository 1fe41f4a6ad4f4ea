#include <string>

#include "json.hpp"

#include "dmind/digest.hpp"
#include "dmind/errors.hpp"
#include "dmind/generation.hpp"
#include "dmind/mode.hpp"
#include "dmind/prompt.hpp"
#include "dmind/templates.hpp"

namespace dmind {

namespace {

// Built-in system prompts. Byte-stable: golden files under tests/golden/
// pin these exact bytes.
constexpr const char* kFastSystem =
    R"(Engage in your **System 1 Thinking Mode**. You MUST react based on the following rules:

    1. Respond immediately with your first thought, based purely on gut feeling or your own knowledge.
    2. No reasoning or explanations allowed.
    3. No thinking process needed.)";

constexpr const char* kNormalSystem =
    "You are an AI assistant who provides helpful responses.";

constexpr const char* kSlowSystem =
    R"(Engage in your **System 2 Thinking Mode**. You MUST think step by step based on the following rules:

  1. Problem Decomposition:
    - First identify the main goal/question
    - Break down into smallest helpful executable units
    - Each step focuses on ONE specific sub-problem
    - Ensure clear logical flow between steps
    - Steps should build towards final solution

  2. Step Quality and Execution:
    - Keep each step focused and concise
    - Present core logic and detailed explanations (1-3 sentences) for each step
    - Support reasoning with specific context and supporting details
    - Continuously evaluate if steps can be broken down further

  3. Step Verification:
    - After each step, verify the logic and reasoning
    - Ensure logical consistency and correctness of explanations
    - Check if each step effectively contributes to the overall goal
    - Address any discrepancies or errors in subsequent steps
    - Maintain a smooth transition between steps

Always remember: Many precise, focused steps > Few broad steps.)";

}  // namespace

std::optional<ThinkingMode> mode_from_string(std::string_view name) {
  if (name == "fast") return ThinkingMode::Fast;
  if (name == "normal") return ThinkingMode::Normal;
  if (name == "slow") return ThinkingMode::Slow;
  return std::nullopt;
}

int default_max_output_tokens(ThinkingMode mode) {
  switch (mode) {
    case ThinkingMode::Fast:
      return 128;
    case ThinkingMode::Normal:
      return 2048;
    case ThinkingMode::Slow:
      return 4096;
  }
  return 2048;
}

GenerationConfig default_generation(ThinkingMode mode) {
  return GenerationConfig{0.6, 0.9, default_max_output_tokens(mode)};
}

GenerationConfig generation_limits(ThinkingMode mode,
                                   const GenerationOverrides& overrides) {
  GenerationConfig config = default_generation(mode);
  if (overrides.temperature) {
    if (*overrides.temperature < 0.0) {
      throw InputError("temperature must be >= 0");
    }
    config.temperature = *overrides.temperature;
  }
  if (overrides.top_p) {
    if (!(*overrides.top_p > 0.0 && *overrides.top_p <= 1.0)) {
      throw InputError("top_p must be in (0, 1]");
    }
    config.top_p = *overrides.top_p;
  }
  if (overrides.max_output_tokens) {
    if (*overrides.max_output_tokens < 1) {
      throw InputError("max_output_tokens must be >= 1");
    }
    config.max_output_tokens = *overrides.max_output_tokens;
  }
  return config;
}

const std::string& TemplateSet::system_for(ThinkingMode mode) const {
  switch (mode) {
    case ThinkingMode::Fast:
      return fast_system;
    case ThinkingMode::Normal:
      return normal_system;
    case ThinkingMode::Slow:
      return slow_system;
  }
  return normal_system;
}

const TemplateSet& builtin_templates() {
  static const TemplateSet set{kFastSystem, kNormalSystem, kSlowSystem, "builtin"};
  return set;
}

TemplateSet load_template_set(const std::optional<std::filesystem::path>& path) {
  if (!path) {
    return builtin_templates();
  }
  const std::string raw = read_file(*path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("template file " + path->string() + ": " + e.what());
  }
  TemplateSet set;
  set.source = path->string();
  for (ThinkingMode mode : kAllModes) {
    const std::string key{to_string(mode)};
    if (!doc.contains(key) || !doc[key].is_string()) {
      throw ConfigError("template file " + path->string() +
                        ": missing template key \"" + key + "\"");
    }
    std::string text = doc[key].get<std::string>();
    if (text.empty()) {
      throw ConfigError("template file " + path->string() + ": template \"" +
                        key + "\" is empty");
    }
    switch (mode) {
      case ThinkingMode::Fast:
        set.fast_system = std::move(text);
        break;
      case ThinkingMode::Normal:
        set.normal_system = std::move(text);
        break;
      case ThinkingMode::Slow:
        set.slow_system = std::move(text);
        break;
    }
  }
  return set;
}

PromptBundle assemble_prompt(ThinkingMode mode, std::string_view question_text,
                             const TemplateSet& templates) {
  if (question_text.empty()) {
    throw InputError("question text must not be empty");
  }
  PromptBundle bundle;
  bundle.system_message = templates.system_for(mode);
  bundle.user_message = std::string{question_text};
  bundle.mode = mode;
  bundle.generation = default_generation(mode);
  return bundle;
}

}  // namespace dmind
