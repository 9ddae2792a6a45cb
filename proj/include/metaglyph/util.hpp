#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace metaglyph::util {

/// 64-bit FNV-1a. Stable across platforms; used for content dedup and cache keys.
constexpr std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v);
std::string base64_encode(std::string_view data);
std::string base64_decode(std::string_view data);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view data);

}  // namespace metaglyph::util
