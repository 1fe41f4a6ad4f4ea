#pragma once

#include <string>
#include <string_view>

#include "dmind/generation.hpp"
#include "dmind/mode.hpp"
#include "dmind/templates.hpp"

namespace dmind {

// Message pair sent to a backend: the mode's template verbatim as the system
// message, the question untouched as the user message.
struct PromptBundle {
  std::string system_message;
  std::string user_message;
  ThinkingMode mode = ThinkingMode::Normal;
  GenerationConfig generation;

  bool operator==(const PromptBundle&) const = default;
};

// Empty question -> InputError.
PromptBundle assemble_prompt(ThinkingMode mode, std::string_view question_text,
                             const TemplateSet& templates);

}  // namespace dmind
