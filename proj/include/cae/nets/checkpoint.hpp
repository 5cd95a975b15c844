#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace cae::nets {

inline constexpr std::uint32_t kCheckpointMajor = 1;
inline constexpr std::uint32_t kCheckpointMinor = 0;

struct NamedArray {
  std::string name;
  std::vector<std::int64_t> shape;
  std::vector<float> data;  // row-major

  std::size_t numel() const noexcept;
};

/// Named float32 parameter arrays plus a tag and the configuration they were built from.
struct NetworkParams {
  std::string component;  // "cae" (encoder + decoder + discriminator) or "classifier"
  std::vector<NamedArray> arrays;
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json extra = nlohmann::json::object();

  const NamedArray* find(const std::string& name) const;
  nlohmann::json shape_manifest() const;
  // Throws ContractError when an array's payload disagrees with its shape or holds non-finite values.
  void validate() const;
};

// Layout (all integers little-endian):
//   "CAECKPT\0"                       8 bytes
//   u32 major, u32 minor
//   u64 header length, header JSON    {"format_version", "component", "config", "extra", "manifest": [{name, dtype, shape}]}
//   per manifest entry, in order:
//     u32 name length, name bytes, u8 dtype (0 = float32), u32 ndim, i64 dims[ndim], float32 payload[prod(dims)]
void save_checkpoint(const std::filesystem::path& path, const NetworkParams& params);
NetworkParams load_checkpoint(const std::filesystem::path& path);

}  // namespace cae::nets
