#ifndef FINSENT_TEXT_H_
#define FINSENT_TEXT_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace finsent {

inline constexpr std::uint64_t kFnvOffsetBasis = 14695981039346656037ULL;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

// FNV-1a, 64-bit. `seed` lets callers continue a running hash.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t seed = kFnvOffsetBasis) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

std::string_view trim(std::string_view s);
std::string ascii_lower(std::string_view s);

// Collapses runs of ASCII whitespace to a single space and trims.
std::string normalize_whitespace(std::string_view s);

std::vector<std::string_view> split(std::string_view s, char sep);

// Joins with a single space.
std::string join_space(std::span<const std::string> parts);

bool is_valid_utf8(std::string_view bytes);

// Supported names: "iso-8859-1" (aliases latin1, latin-1), "utf-8" (utf8),
// and "auto" (strict UTF-8 first, ISO-8859-1 otherwise). Throws
// EncodingError on invalid UTF-8 or an unknown encoding name.
std::string decode_to_utf8(std::string_view bytes, std::string_view encoding);

}  // namespace finsent

#endif  // FINSENT_TEXT_H_
