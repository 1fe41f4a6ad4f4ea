#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace dmind {

inline constexpr std::uint64_t kFnvOffsetBasis = 14695981039346656037ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

// FNV-1a is fully specified, so digests are stable across platforms and builds.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t seed = kFnvOffsetBasis) {
  std::uint64_t h = seed;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

std::string to_hex64(std::uint64_t value);

// 16-char lowercase hex of fnv1a64(bytes).
std::string digest_hex(std::string_view bytes);

// Digest of a file's raw bytes; ConfigError when the file cannot be read.
std::string file_digest_hex(const std::filesystem::path& path);

// Reads a whole file; ConfigError when missing/unreadable.
std::string read_file(const std::filesystem::path& path);

void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace dmind
