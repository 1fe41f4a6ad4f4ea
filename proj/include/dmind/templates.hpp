#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "dmind/mode.hpp"

namespace dmind {

// The three per-mode system prompts. Immutable after construction; safe to
// share across threads.
struct TemplateSet {
  std::string fast_system;
  std::string normal_system;
  std::string slow_system;
  std::string source = "builtin";  // "builtin" or the override file path

  const std::string& system_for(ThinkingMode mode) const;
};

// Built-in tri-mode prompts; byte-stable (golden-tested).
const TemplateSet& builtin_templates();

// Built-ins when no path is given; otherwise a UTF-8 JSON document with keys
// "fast", "normal", "slow". Missing file, missing key, or an empty template
// -> ConfigError.
TemplateSet load_template_set(
    const std::optional<std::filesystem::path>& path = std::nullopt);

}  // namespace dmind
