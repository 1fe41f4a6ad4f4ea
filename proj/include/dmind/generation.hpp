#pragma once

#include <optional>

#include "dmind/mode.hpp"

namespace dmind {

// Sampling settings sent with every request.
struct GenerationConfig {
  double temperature = 0.6;
  double top_p = 0.9;
  int max_output_tokens = 2048;

  bool operator==(const GenerationConfig&) const = default;
};

struct GenerationOverrides {
  std::optional<double> temperature;
  std::optional<double> top_p;
  std::optional<int> max_output_tokens;
};

// Per-mode output caps: 128 (Fast), 2048 (Normal), 4096 (Slow).
int default_max_output_tokens(ThinkingMode mode);

GenerationConfig default_generation(ThinkingMode mode);

// Mode defaults with overrides applied. Invalid override (temperature < 0,
// top_p outside (0,1], max tokens < 1) -> InputError.
GenerationConfig generation_limits(ThinkingMode mode,
                                   const GenerationOverrides& overrides = {});

}  // namespace dmind
