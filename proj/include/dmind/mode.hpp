#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace dmind {

// The three thinking modes in canonical cost order: Fast < Normal < Slow.
enum class ThinkingMode : std::uint8_t { Fast = 0, Normal = 1, Slow = 2 };

inline constexpr std::array<ThinkingMode, 3> kAllModes = {
    ThinkingMode::Fast, ThinkingMode::Normal, ThinkingMode::Slow};

constexpr std::size_t mode_index(ThinkingMode mode) {
  return static_cast<std::size_t>(mode);
}

constexpr std::string_view to_string(ThinkingMode mode) {
  switch (mode) {
    case ThinkingMode::Fast:
      return "fast";
    case ThinkingMode::Normal:
      return "normal";
    case ThinkingMode::Slow:
      return "slow";
  }
  return "normal";
}

std::optional<ThinkingMode> mode_from_string(std::string_view name);

// Cheaper of two modes under the canonical order.
constexpr ThinkingMode cheaper(ThinkingMode a, ThinkingMode b) {
  return mode_index(a) <= mode_index(b) ? a : b;
}

}  // namespace dmind
