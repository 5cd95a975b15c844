#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace cae {

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::uint64_t fnv1a64(std::span<const unsigned char> bytes,
                      std::uint64_t state = 0xcbf29ce484222325ULL) noexcept;
std::string hex_digest(std::uint64_t value);
std::string digest_string(std::string_view text);

// Digest of a file, or of every regular file below a directory (sorted by relative path).
std::string digest_path(const std::filesystem::path& path);

}  // namespace cae
