#include "cae/nets/checkpoint.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <numeric>

#include "cae/common/errors.hpp"

namespace cae::nets {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'C', 'A', 'E', 'C', 'K', 'P', 'T', '\0'};

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw ConfigError("checkpoint: truncated file");
  return value;
}

std::size_t shape_numel(const std::vector<std::int64_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         [](std::size_t a, std::int64_t b) { return a * static_cast<std::size_t>(b); });
}

}  // namespace

std::size_t NamedArray::numel() const noexcept { return shape_numel(shape); }

const NamedArray* NetworkParams::find(const std::string& name) const {
  for (const auto& a : arrays) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

nlohmann::json NetworkParams::shape_manifest() const {
  nlohmann::json m = nlohmann::json::array();
  for (const auto& a : arrays) m.push_back({{"name", a.name}, {"dtype", "float32"}, {"shape", a.shape}});
  return m;
}

void NetworkParams::validate() const {
  for (const auto& a : arrays) {
    if (a.data.size() != a.numel()) throw ContractError("checkpoint: array '" + a.name + "' payload/shape mismatch");
    for (float v : a.data) {
      if (!std::isfinite(v)) throw ContractError("checkpoint: array '" + a.name + "' holds non-finite values");
    }
  }
}

void save_checkpoint(const std::filesystem::path& path, const NetworkParams& params) {
  params.validate();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("checkpoint: cannot write '" + path.string() + "'");
    const nlohmann::json header = {
        {"format_version", std::to_string(kCheckpointMajor) + "." + std::to_string(kCheckpointMinor)},
        {"component", params.component},
        {"config", params.config},
        {"extra", params.extra},
        {"manifest", params.shape_manifest()}};
    const std::string text = header.dump();
    out.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, kCheckpointMajor);
    put<std::uint32_t>(out, kCheckpointMinor);
    put<std::uint64_t>(out, text.size());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& a : params.arrays) {
      put<std::uint32_t>(out, static_cast<std::uint32_t>(a.name.size()));
      out.write(a.name.data(), static_cast<std::streamsize>(a.name.size()));
      put<std::uint8_t>(out, 0);
      put<std::uint32_t>(out, static_cast<std::uint32_t>(a.shape.size()));
      for (std::int64_t d : a.shape) put<std::int64_t>(out, d);
      out.write(reinterpret_cast<const char*>(a.data.data()), static_cast<std::streamsize>(a.data.size() * sizeof(float)));
    }
    if (!out) throw std::runtime_error("checkpoint: write failed for '" + path.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

NetworkParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("checkpoint: cannot open '" + path.string() + "'");
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw ConfigError("checkpoint: bad magic in '" + path.string() + "'");
  const auto major = get<std::uint32_t>(in);
  get<std::uint32_t>(in);
  if (major != kCheckpointMajor) {
    throw ConfigError("checkpoint: unsupported major version " + std::to_string(major));
  }
  const auto header_len = get<std::uint64_t>(in);
  std::string text(header_len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw ConfigError("checkpoint: truncated header");
  const auto header = nlohmann::json::parse(text);

  NetworkParams params;
  params.component = header.at("component").get<std::string>();
  params.config = header.value("config", nlohmann::json::object());
  params.extra = header.value("extra", nlohmann::json::object());
  for (const auto& entry : header.at("manifest")) {
    NamedArray a;
    const auto name_len = get<std::uint32_t>(in);
    a.name.resize(name_len);
    in.read(a.name.data(), name_len);
    if (get<std::uint8_t>(in) != 0) throw ConfigError("checkpoint: unsupported dtype for '" + a.name + "'");
    const auto ndim = get<std::uint32_t>(in);
    for (std::uint32_t k = 0; k < ndim; ++k) a.shape.push_back(get<std::int64_t>(in));
    if (a.name != entry.at("name").get<std::string>() || a.shape != entry.at("shape").get<std::vector<std::int64_t>>()) {
      throw ConfigError("checkpoint: payload for '" + a.name + "' disagrees with the shape manifest");
    }
    a.data.resize(a.numel());
    in.read(reinterpret_cast<char*>(a.data.data()), static_cast<std::streamsize>(a.data.size() * sizeof(float)));
    if (!in) throw ConfigError("checkpoint: truncated payload for '" + a.name + "'");
    params.arrays.push_back(std::move(a));
  }
  params.validate();
  return params;
}

}  // namespace cae::nets
