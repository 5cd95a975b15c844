#include "cae/common/digest.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <vector>

namespace cae {

std::uint64_t fnv1a64(std::span<const unsigned char> bytes, std::uint64_t state) noexcept {
  for (unsigned char b : bytes) {
    state ^= b;
    state *= 0x100000001b3ULL;
  }
  return state;
}

std::string hex_digest(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string digest_string(std::string_view text) {
  return hex_digest(fnv1a64({reinterpret_cast<const unsigned char*>(text.data()), text.size()}));
}

namespace {

std::uint64_t digest_file(const std::filesystem::path& path, std::uint64_t state) {
  std::ifstream in(path, std::ios::binary);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a64(bytes, state);
}

}  // namespace

std::string digest_path(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  if (!fs::exists(path)) return "missing";
  if (fs::is_regular_file(path)) return hex_digest(digest_file(path, 0xcbf29ce484222325ULL));
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(path)) {
    if (entry.is_regular_file()) files.push_back(fs::relative(entry.path(), path));
  }
  std::sort(files.begin(), files.end());
  std::uint64_t state = 0xcbf29ce484222325ULL;
  for (const auto& rel : files) {
    const std::string name = rel.generic_string();
    state = fnv1a64({reinterpret_cast<const unsigned char*>(name.data()), name.size()}, state);
    state = digest_file(path / rel, state);
  }
  return hex_digest(state);
}

}  // namespace cae
