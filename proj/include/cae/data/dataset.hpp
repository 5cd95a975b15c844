#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cae/common/image.hpp"
#include "cae/common/random.hpp"

namespace cae::data {

enum class Split { train, test };

std::string_view to_string(Split split) noexcept;
Split parse_split(std::string_view text);

struct ClassLabel {
  int index = 0;
  std::string name;

  friend bool operator==(const ClassLabel&, const ClassLabel&) = default;
};

struct ImageSample {
  std::string id;
  Image pixels;
  ClassLabel label;
  Split split = Split::train;
};

enum class DatasetSource { folder, synthetic };

struct DatasetManifest {
  std::vector<ClassLabel> classes;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  int image_size = 64;
  int channels = 1;
  DatasetSource source = DatasetSource::folder;
  std::uint64_t seed = 0;

  // Checks index/name uniqueness and positive sizes; throws ConfigError.
  void validate() const;
  const ClassLabel& class_by_name(std::string_view name) const;
  int num_classes() const noexcept { return static_cast<int>(classes.size()); }
};

void to_json(nlohmann::json& j, const DatasetManifest& m);
void from_json(const nlohmann::json& j, DatasetManifest& m);

struct LoadReport {
  std::size_t loaded = 0;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
};

struct Dataset {
  DatasetManifest manifest;
  std::vector<ImageSample> samples;
  // Ground-truth masks keyed by sample id (single channel, values 0/1).
  std::map<std::string, Image> masks;
  LoadReport report;

  std::vector<ImageSample> split(Split which) const;
  const ImageSample& by_id(std::string_view id) const;
  const Image* mask_for(std::string_view id) const;
};

// Offsets of the largest centred square inside a width x height image.
struct CropWindow {
  int x = 0;
  int y = 0;
  int side = 0;
};
CropWindow center_crop_window(int width, int height) noexcept;

Image center_crop_square(const Image& image);
Image resize_square(const Image& image, int size);
// Crop to the centred square, then resize to size x size.
Image preprocess(const Image& image, int size);

// Reads <root>/<split>/<class_name>/<files>. Files ending in "_mask" are read
// as ground-truth masks rather than samples. The returned manifest carries the
// enumerated per-split counts.
Dataset load_dataset(const std::filesystem::path& root, const DatasetManifest& manifest);
// Same, reading the manifest from <root>/manifest.json.
Dataset load_dataset(const std::filesystem::path& root);

// Writes the folder layout, masks (<id>_mask.png) and manifest.json; `extra`
// keys are merged into manifest.json next to "manifest".
void save_dataset(const Dataset& dataset, const std::filesystem::path& root,
                  const nlohmann::json& extra = nlohmann::json::object());

Image flip_horizontal(const Image& image);
ImageSample augment(const ImageSample& sample, double flip_probability, Rng& rng);

}  // namespace cae::data
